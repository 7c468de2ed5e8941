// Runs the acceptance criteria and prints one line per criterion.
// Usage: mlsd_acceptance [id ...]   (no ids: all criteria)

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "mlsd/acceptance.hpp"
#include "mlsd/io.hpp"

int main(int argc, char** argv) {
    using namespace mlsd;
    std::vector<int> ids;
    for (int a = 1; a < argc; ++a) {
        const int id = std::atoi(argv[a]);
        if (id < 1 || id > acceptance::kCriterionCount) {
            std::cerr << "unknown criterion: " << argv[a] << "\n";
            return 2;
        }
        ids.push_back(id);
    }
    if (ids.empty())
        for (int i = 1; i <= acceptance::kCriterionCount; ++i) ids.push_back(i);
    int failed = 0;
    for (int id : ids) {
        const auto r = acceptance::run(id);
        failed += !r.pass;
        std::cout << "criterion " << r.id << " " << (r.pass ? "PASS" : "FAIL") << " " << r.name << " ("
                  << format_double(r.seconds) << " s, limit " << format_double(r.time_limit) << " s): "
                  << r.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
