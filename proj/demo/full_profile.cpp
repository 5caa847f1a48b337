// Optimal depth weights for full-profile comparisons (S = K) at a few level
// counts, with the D-efficiency of the best single depth.

#include <cstdio>

#include "pcdesign/pcdesign.hpp"

int main() {
    std::printf("%3s %3s  %-28s %s\n", "K", "v", "support (depth:weight)", "eff(best point mass)");
    for (int K = 5; K <= 10; ++K) {
        for (int v : {2, 3, 5}) {
            const pcd::DesignConfig config{K, K, v};
            const pcd::OptimalDesignReport report = pcd::optimize_weights(config);

            char support[128] = "";
            int used = 0;
            for (std::size_t i = 0; i < report.support.size(); ++i) {
                used += std::snprintf(support + used, sizeof support - used, "%s%d:%.3f",
                                      i ? " " : "", report.support[i], report.support_weights[i]);
            }

            double best = 0.0;
            for (int d = 1; d <= K; ++d) {
                const auto point = pcd::InvariantDesign::point_mass(config, d);
                if (!pcd::block_info(point).singular()) {
                    best = std::max(best, pcd::d_efficiency(point, report.design));
                }
            }
            std::printf("%3d %3d  %-28s %.4f\n", K, v, support, best);
        }
    }
}
