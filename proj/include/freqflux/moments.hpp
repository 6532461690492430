/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// One-pass central moments up to fourth order with the pairwise update
// formulas of Pebay (2008). Skewness and kurtosis are the plain moment ratios
// g1 and g2 without small-sample bias correction.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace freqflux {

struct MomentAccumulator {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        const double n1 = static_cast<double>(n);
        ++n;
        const double nn = static_cast<double>(n);
        const double delta = x - mean;
        const double dn = delta / nn;
        const double dn2 = dn * dn;
        const double t1 = delta * dn * n1;
        mean += dn;
        m4 += t1 * dn2 * (nn * nn - 3.0 * nn + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
        m3 += t1 * dn * (nn - 2.0) - 3.0 * dn * m2;
        m2 += t1;
    }

    void add(std::span<const double> xs) {
        for (double x : xs) add(x);
    }

    void merge(const MomentAccumulator& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double nx = na + nb;
        const double d = o.mean - mean;
        const double d2 = d * d;
        const double d3 = d2 * d;
        const double d4 = d2 * d2;
        const double m2x = m2 + o.m2 + d2 * na * nb / nx;
        const double m3x = m3 + o.m3 + d3 * na * nb * (na - nb) / (nx * nx) +
                           3.0 * d * (na * o.m2 - nb * m2) / nx;
        const double m4x = m4 + o.m4 +
                           d4 * na * nb * (na * na - na * nb + nb * nb) / (nx * nx * nx) +
                           6.0 * d2 * (na * na * o.m2 + nb * nb * m2) / (nx * nx) +
                           4.0 * d * (na * o.m3 - nb * m3) / nx;
        mean += d * nb / nx;
        m2 = m2x;
        m3 = m3x;
        m4 = m4x;
        n += o.n;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double population_variance() const { return n > 0 ? m2 / static_cast<double>(n) : 0.0; }
    double skewness() const {
        return m2 > 0.0 ? std::sqrt(static_cast<double>(n)) * m3 / std::pow(m2, 1.5) : 0.0;
    }
    double excess_kurtosis() const {
        return m2 > 0.0 ? static_cast<double>(n) * m4 / (m2 * m2) - 3.0 : 0.0;
    }
};

/// Deterministic pairwise-tree reduction: neighbours are merged level by
/// level, so the result depends only on the order of `parts`.
inline MomentAccumulator pairwise_merge(std::vector<MomentAccumulator> parts) {
    if (parts.empty()) return {};
    while (parts.size() > 1) {
        std::vector<MomentAccumulator> next;
        next.reserve((parts.size() + 1) / 2);
        for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
            MomentAccumulator a = parts[i];
            a.merge(parts[i + 1]);
            next.push_back(a);
        }
        if (parts.size() % 2 == 1) next.push_back(parts.back());
        parts = std::move(next);
    }
    return parts.front();
}

inline MomentAccumulator moments_of(std::span<const double> xs) {
    MomentAccumulator acc;
    acc.add(xs);
    return acc;
}

}  // namespace freqflux
