// Builds the dendrite of {1, 1/2, ..., 1/8, 0}, extends the shift 1/n -> 1/(n+1)
// (with 0 fixed) and follows an interior point until it stops moving.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "dendrix/dendrix.hpp"

int main() {
    const auto space = dendrix::harmonic_space(8);
    std::vector<std::size_t> shift(space.size());
    for (std::size_t x = 0; x < space.size(); ++x) {
        shift[x] = x + 1 < space.size() - 1 ? x + 1 : space.size() - 1;
    }

    const auto system = dendrix::embed_system(space, shift);
    const auto& d = *system.dendrite;
    std::printf("%zu vertices, %zu edges, root {", d.vertex_count(), d.edge_count());
    for (auto p : d.members(d.root())) std::printf(" %s", space.label(p).c_str());
    std::printf(" }\n");

    // rho agrees with d on the endpoints
    const auto a = dendrix::DPoint::vertex(system.endpoint[1]);
    const auto b = dendrix::DPoint::vertex(system.endpoint[4]);
    std::printf("d(1/2, 1/5) = %.6f, rho = %.6f\n", space.distance(1, 4), dendrix::rho(d, a, b));

    auto x = d.edge_point(0, 0.3);
    for (int step = 0; step < 64; ++step) {
        const auto next = system.map(x);
        std::printf("step %2d: %s\n", step, next.is_vertex() ? ("vertex " + std::to_string(next.vertex_id())).c_str()
                                                              : ("edge " + std::to_string(next.edge_id()) + " t=" +
                                                                 std::to_string(next.t())).c_str());
        if (next == x) break;
        x = next;
    }
}
