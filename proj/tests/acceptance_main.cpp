#include "frontlab/acceptance.hpp"

#include <cstdio>

int main()
{
    const auto results = frontlab::run_acceptance();
    int failed = 0;
    for (const auto& r : results) {
        std::printf("%s  [%.1fs]\n", frontlab::format_line(r).c_str(), r.seconds);
        if (!r.pass) ++failed;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failed);
    return failed == 0 ? 0 : 1;
}
