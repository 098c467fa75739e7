#include "frontlab/io.hpp"

#include "frontlab/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace frontlab {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path.string());
    return out;
}

template <typename Fn>
void for_each_snapshot(const Trajectory& traj, double every, Fn&& fn)
{
    double next = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        const FieldState& s = traj.snapshots[k];
        const bool last = k + 1 == traj.snapshots.size();
        if (s.t + 1e-9 >= next || last) {
            fn(s);
            next = s.t + every;
        }
    }
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_track_csv(const std::filesystem::path& path, const Trajectory& traj)
{
    if (traj.tracks.empty()) fail(ErrorKind::InvalidInput, "trajectory has no tracks");
    const InterfaceTrack* half = nullptr;
    std::vector<const InterfaceTrack*> others;
    for (const auto& tr : traj.tracks) {
        if (std::abs(tr.level - 0.5) < 1e-12) {
            half = &tr;
        } else {
            others.push_back(&tr);
        }
    }
    if (half == nullptr) half = &traj.tracks.front();
    auto out = open_out(path);
    out << "t,x_half";
    for (const auto* tr : others) out << ",x_" << format_double(tr->level);
    out << ",window_left,window_right\n";
    for (std::size_t i = 0; i < half->size(); ++i) {
        out << format_double(half->t[i]) << ',' << format_double(half->x[i]);
        for (const auto* tr : others) {
            out << ',' << (i < tr->size() ? format_double(tr->x[i]) : std::string("nan"));
        }
        out << ',' << format_double(half->window_left[i]) << ',' << format_double(half->window_right[i]) << '\n';
    }
}

void write_snapshots_csv(const std::filesystem::path& path, const Trajectory& traj, double every)
{
    auto out = open_out(path);
    out << "t,x,u\n";
    for_each_snapshot(traj, every, [&](const FieldState& s) {
        const std::string t = format_double(s.t);
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            out << t << ',' << format_double(s.x(i)) << ',' << format_double(s.u(i)) << '\n';
        }
    });
}

void write_snapshots_text(const std::filesystem::path& path, const Trajectory& traj, double every)
{
    auto out = open_out(path);
    for_each_snapshot(traj, every, [&](const FieldState& s) {
        out << format_double(s.t) << ' ' << s.origin << ' ' << format_double(s.dx) << ' ' << s.size();
        for (Eigen::Index i = 0; i < s.size(); ++i) out << ' ' << format_double(s.u(i));
        out << '\n';
    });
}

std::vector<FieldState> read_snapshots_text(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidInput, "cannot read " + path.string());
    std::vector<FieldState> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        FieldState s;
        Eigen::Index n = 0;
        if (!(ls >> s.t >> s.origin >> s.dx >> n) || n < 0) {
            fail(ErrorKind::InvalidInput, "malformed snapshot header in " + path.string());
        }
        s.u.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            std::string tok;
            if (!(ls >> tok)) fail(ErrorKind::InvalidInput, "truncated snapshot in " + path.string());
            // from_chars keeps subnormals that stod rejects
            double v = 0.0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} && res.ec != std::errc::result_out_of_range) {
                fail(ErrorKind::InvalidInput, "bad value '" + tok + "' in " + path.string());
            }
            s.u(i) = v;
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_shifts_jsonl(const std::filesystem::path& path, const Trajectory& traj)
{
    auto out = open_out(path);
    for (const auto& sh : traj.shifts) {
        out << nlohmann::json{{"t", sh.t}, {"cells", sh.cells}, {"origin_after", sh.origin_after}}.dump() << '\n';
    }
}

void write_profile(const std::filesystem::path& path, const FrontProfile& p)
{
    auto out = open_out(path);
    out << "# xi phi  (c = " << format_double(p.c) << ")\n";
    for (Eigen::Index i = 0; i < p.size(); ++i) out << format_double(p.xi(i)) << ' ' << format_double(p.phi(i)) << '\n';
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

} // namespace frontlab
