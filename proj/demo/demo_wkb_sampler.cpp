// Draws phase-space samples for the 1D WKB example with the x^2-weighted
// Gaussian amplitude and prints a coarse histogram of q: the marginal is
// bimodal (the amplitude vanishes at the origin), which the inverse-transform
// sampler must reproduce.

#include <cstdio>
#include <vector>

#include "fgs/sampling.hpp"
#include "fgs/scenarios.hpp"

int main() {
    const auto cfg = fgs::scenario_config<1>("1d-wkb-poly-c1", 512.0);
    const auto& data = std::get<fgs::WKBInitialData<1>>(cfg.data);

    const auto batch = fgs::sample_wkb_inverse_transform(data, 20000, 7);

    constexpr int nbins = 41;
    const double lo = -0.5, hi = 0.5;
    std::vector<int> hist(nbins, 0);
    for (const auto& z : batch.points) {
        const int b = static_cast<int>((z.q[0] - lo) / (hi - lo) * nbins);
        if (b >= 0 && b < nbins) ++hist[b];
    }
    int peak = 1;
    for (int h : hist) peak = std::max(peak, h);
    for (int b = 0; b < nbins; ++b) {
        std::printf("% .3f %6d |", lo + (b + 0.5) * (hi - lo) / nbins, hist[b]);
        for (int s = 0; s < 60 * hist[b] / peak; ++s) std::putchar('#');
        std::putchar('\n');
    }
    return 0;
}
