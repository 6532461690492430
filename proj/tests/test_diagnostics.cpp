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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include <boost/math/distributions/normal.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "freqflux/diagnostics.hpp"
#include "freqflux/synth.hpp"
#include "test_util.hpp"

namespace freqflux {
namespace {

std::vector<double> normal_sample(std::size_t n, std::uint64_t seed) {
    Philox4x32 rng(seed, 0, 0);
    boost::random::normal_distribution<double> nd;
    std::vector<double> out(n);
    for (auto& x : out) x = nd(rng);
    return out;
}

TEST(Moments, MergeMatchesSequential) {
    const auto xs = normal_sample(10001, 1);
    MomentAccumulator all = moments_of(xs);
    std::vector<MomentAccumulator> parts;
    for (std::size_t i = 0; i < xs.size(); i += 997) {
        parts.push_back(moments_of(std::span<const double>(xs).subspan(i, std::min<std::size_t>(997, xs.size() - i))));
    }
    const MomentAccumulator merged = pairwise_merge(parts);
    EXPECT_EQ(merged.n, all.n);
    EXPECT_NEAR(merged.mean, all.mean, 1e-14);
    EXPECT_NEAR(merged.m2, all.m2, 1e-10 * all.m2);
    EXPECT_NEAR(merged.m3, all.m3, 1e-8 * std::abs(all.m4));
    EXPECT_NEAR(merged.m4, all.m4, 1e-10 * all.m4);
}

TEST(Normality, TooFewAndDegenerate) {
    std::vector<double> few(19, 1.0);
    try {
        normality_report(few);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::too_few_samples);
    }
    std::vector<double> constant(50, 2.0);
    try {
        normality_report(constant);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::degenerate_sample);
    }
}

TEST(Normality, HistogramAndQqInvariants) {
    const auto xs = normal_sample(5000, 2);
    const auto r = normality_report(xs, {37, 0});
    EXPECT_EQ(std::accumulate(r.histogram.counts.begin(), r.histogram.counts.end(), std::uint64_t{0}), r.n);
    EXPECT_EQ(r.histogram.counts.size(), 37u);
    ASSERT_EQ(r.qq.size(), r.n);
    for (std::size_t i = 1; i < r.qq.size(); ++i) {
        EXPECT_GT(r.qq[i].theoretical, r.qq[i - 1].theoretical);
        EXPECT_GE(r.qq[i].empirical, r.qq[i - 1].empirical);
    }
}

TEST(Normality, PerfectQuantileGridLiesOnIdentity) {
    const std::size_t n = 400;
    const boost::math::normal_distribution<double> unit;
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) grid[i] = boost::math::quantile(unit, (i + 0.5) / n);
    const auto r = normality_report(grid);
    for (const auto& p : r.qq) EXPECT_NEAR(p.theoretical, p.empirical, 1e-12);
}

TEST(Normality, JarqueBeraAffineInvariant) {
    auto xs = normal_sample(3000, 3);
    const auto a = normality_report(xs);
    for (auto& x : xs) x = -4.0 + 0.01 * x;
    const auto b = normality_report(xs);
    EXPECT_NEAR(a.jb_stat, b.jb_stat, 1e-8 * a.jb_stat + 1e-10);
}

TEST(Normality, GaussianDrawsPassJarqueBera) {
    int pass = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        if (normality_report(normal_sample(100000, 1000 + seed)).jb_p > 0.01) ++pass;
    }
    EXPECT_GE(pass, 95);
}

TEST(Normality, WeibullSampleSkewness) {
    Philox4x32 rng(6, 0, 0);
    boost::random::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(1000000);
    for (auto& x : xs) x = std::sqrt(-std::log1p(-u(rng)));
    const auto r = normality_report(xs);
    EXPECT_NEAR(r.skewness, 0.6311, 0.05 * 0.6311);
    EXPECT_LT(r.jb_p, 1e-10);
}

TEST(Normality, KolmogorovSmirnov) {
    const auto g = normality_report(normal_sample(2000, 9));
    EXPECT_GT(g.ks_p, 0.01);
    Philox4x32 rng(10, 0, 0);
    boost::random::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(2000);
    for (auto& x : xs) x = u(rng);
    EXPECT_LT(normality_report(xs).ks_p, 1e-3);
    EXPECT_NEAR(kolmogorov_pvalue(1.3581), 0.05, 1e-3);
}

WeightedSourceSet equal_gaussians(std::size_t n) {
    WeightedSourceSet set(n);
    for (auto& s : set) {
        s.weight = 1.0;
        s.variance = 1.0;
        s.gaussian = true;
    }
    return set;
}

TEST(Lindeberg, EqualGaussiansMatchClosedForm) {
    const auto r = lindeberg_ratio(equal_gaussians(1000), 0.1);
    const double z = 0.1 * std::sqrt(1000.0);
    const boost::math::normal_distribution<double> unit;
    const double expected = 2.0 * (z * boost::math::pdf(unit, z) + boost::math::cdf(boost::math::complement(unit, z)));
    EXPECT_NEAR(r.ratio, expected, 1e-12);
    EXPECT_LT(lindeberg_ratio(equal_gaussians(2000), 0.1).ratio, 1e-3);
    EXPECT_TRUE(lindeberg_ratio(equal_gaussians(2000), 0.1).pass);
}

TEST(Lindeberg, DominantSourceFails) {
    auto set = equal_gaussians(100);
    // 99 % of the total variance in one source.
    set[0].variance = 99.0 * 99.0;
    const auto r = lindeberg_ratio(set, 0.1);
    EXPECT_GT(r.ratio, 0.5);
    EXPECT_FALSE(r.pass);
}

TEST(Lindeberg, GuardsAndMissingDistribution) {
    try {
        lindeberg_ratio(equal_gaussians(1), 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::insufficient_sources);
    }
    auto set = equal_gaussians(3);
    set[1].gaussian = false;
    try {
        lindeberg_ratio(set, 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::missing_distribution);
    }
}

TEST(Lindeberg, ScaleInvariantAndMonotoneInEpsilon) {
    auto set = equal_gaussians(50);
    set[3].weight = 4.0;
    set[7].sample = normal_sample(20000, 4);
    set[7].gaussian = false;
    const double base = lindeberg_ratio(set, 0.1).ratio;
    for (auto& s : set) s.weight *= -3.5;
    EXPECT_NEAR(lindeberg_ratio(set, 0.1).ratio, base, 1e-12);
    double prev = 1.0;
    for (double eps : {0.01, 0.05, 0.1, 0.2, 0.5, 1.0}) {
        const double r = lindeberg_ratio(set, eps).ratio;
        EXPECT_LE(r, prev + 1e-15);
        prev = r;
    }
}

TEST(Lindeberg, EmpiricalAgreesWithClosedForm) {
    WeightedSourceSet a = equal_gaussians(4), b = equal_gaussians(4);
    for (std::size_t i = 0; i < 4; ++i) {
        b[i].gaussian = false;
        b[i].sample = normal_sample(200000, 50 + i);
    }
    EXPECT_NEAR(lindeberg_ratio(b, 0.3).ratio, lindeberg_ratio(a, 0.3).ratio, 0.02);
}

TEST(Dominance, SharesAndRanking) {
    PropagationMap map;
    map.w_p = Vec::Zero(4);
    map.w_q = Vec::Zero(4);
    map.w_p(1) = 1.0;
    map.w_p(3) = -2.0;
    std::vector<NoiseModel> noise(2);
    noise[0].bus = 1;
    noise[1].bus = 3;
    const auto rows = dominance_analysis(map, noise, 0.01);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].bus, 3u);
    EXPECT_NEAR(rows[0].share, 0.8, 1e-12);
    EXPECT_NEAR(rows[1].share, 0.2, 1e-12);
    const auto single = dominance_analysis(map, std::span<const NoiseModel>(noise).first(1), 0.01);
    EXPECT_NEAR(single[0].share, 1.0, 1e-15);
}

TEST(Dominance, SkewSignFollowsWeightAndMirror) {
    PropagationMap map;
    map.w_p = Vec::Ones(3);
    map.w_q = Vec::Zero(3);
    map.w_p(2) = -1.0;
    std::vector<NoiseModel> noise(3);
    for (std::size_t i = 0; i < 3; ++i) {
        noise[i].bus = i;
        noise[i].kind = NoiseKind::ou_weibull_mapped;
    }
    noise[1].mirror = true;
    const auto rows = dominance_analysis(map, noise, 0.01);
    for (const auto& r : rows) {
        if (r.bus == 0) EXPECT_EQ(r.skew_sign, 1);
        if (r.bus == 1) EXPECT_EQ(r.skew_sign, -1);
        if (r.bus == 2) EXPECT_EQ(r.skew_sign, -1);
    }
}

TEST(Synth, RandomNetworksAreValidAndSeeded) {
    RandomNetworkSpec spec;
    const Network a = random_network(spec, 5);
    const Network b = random_network(spec, 5);
    const Network c = random_network(spec, 6);
    EXPECT_NO_THROW(validate_network(a));
    EXPECT_EQ(a.branches.size(), b.branches.size());
    EXPECT_EQ(a.branches[7].x, b.branches[7].x);
    EXPECT_NE(a.branches[7].x, c.branches[7].x);
    EXPECT_NO_THROW(solve_power_flow(a));
}

TEST(Synth, SubnetAttachesBelowHostBus) {
    SubnetSpec spec;
    spec.n_buses = 30;
    spec.n_loads = 60;
    const auto sub = attach_subnetwork(test::ieee14(), spec, 1);
    EXPECT_EQ(sub.net.size(), 44u);
    EXPECT_EQ(sub.loads.size(), 60u);
    EXPECT_EQ(sub.net.branches[20].from_bus, 3u);
    EXPECT_NO_THROW(solve_power_flow(sub.net));
}

TEST(Aggregation, SmallSubnetSmoke) {
    AggregationSpec spec;
    spec.subnet.n_buses = 40;
    spec.subnet.n_loads = 80;
    const auto r = aggregation_experiment(test::ieee14(), spec, 0.01, 2000, 2, 5, 1);
    EXPECT_EQ(r.uniform.report.n, 4000u);
    EXPECT_GE(r.dominant_bus, 14u);
    EXPECT_GT(r.dominant.max_share, r.uniform.max_share);
}

}  // namespace
}  // namespace freqflux
