// Runs the pair (0, eta, p_0), (0, eta', p_0) where eta and eta' differ exactly at
// even positions, and prints the fraction of steps closer than s = 2 at the
// top of each column.

#include <cstdio>
#include <vector>

#include "dendrix/dendrix.hpp"

int main() {
    using namespace dendrix;
    std::vector<std::uint8_t> even(OmegaWord::kPeriodicDepth, 0);
    for (std::size_t i = 0; i < even.size(); i += 2) even[i] = 1;

    const SkewState a{OmegaWord{}, OmegaWord{}, FiberPoint::p(0)};
    const SkewState b{OmegaWord{}, OmegaWord{even}, FiberPoint::p(0)};
    const std::vector<int> columns{2, 3, 4, 5, 6};
    const auto verdict = classify_pair(a, b, {2.0}, column_checkpoints(columns));

    std::printf("certified lower bound %.4f, Li-Yorke %s\n", verdict.proximal_lower_bound,
                verdict.li_yorke_possible ? "possible" : "impossible");
    for (std::size_t k = 0; k < columns.size(); ++k) {
        std::printf("column %d  N = %8llu  freq(d < 2) = %.6f\n", columns[k],
                    static_cast<unsigned long long>(verdict.profile.checkpoints[k]), verdict.profile.freq[k][0]);
    }
}
