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

// Distribution diagnostics: normality reports, a finite-N Lindeberg ratio and
// the weight-dominance table that explains when aggregation stays Gaussian.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "freqflux/errors.hpp"
#include "freqflux/moments.hpp"
#include "freqflux/stochastic.hpp"
#include "freqflux/synth.hpp"

namespace freqflux {

struct Histogram {
    std::vector<double> edges;  ///< bins + 1 edges
    std::vector<std::uint64_t> counts;
};

struct QqPoint {
    double theoretical = 0.0;  ///< standard normal quantile at (i - 0.5) / n
    double empirical = 0.0;    ///< i-th order statistic
};

struct StatsReport {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  ///< unbiased
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double jb_stat = 0.0;
    double jb_p = 1.0;
    double ks_stat = 0.0;
    double ks_p = 1.0;
    std::vector<QqPoint> qq;
    Histogram histogram;
};

/// Asymptotic Kolmogorov tail probability P(K > lambda).
inline double kolmogorov_pvalue(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Jarque-Bera statistic from moment ratios, with its chi-square(2) p-value.
inline std::pair<double, double> jarque_bera(std::size_t n, double skew, double excess_kurt) {
    const double jb = static_cast<double>(n) / 6.0 * (skew * skew + 0.25 * excess_kurt * excess_kurt);
    return {jb, std::exp(-0.5 * jb)};
}

struct NormalityOptions {
    std::size_t bins = 50;
    /// Keep at most this many evenly spaced Q-Q points; 0 keeps all.
    std::size_t max_qq_points = 0;
};

inline StatsReport normality_report(std::span<const double> sample, const NormalityOptions& opt = {}) {
    if (sample.size() < 20) {
        throw Error(ErrorKind::too_few_samples,
                    "normality report needs n >= 20, got " + std::to_string(sample.size()));
    }
    for (double x : sample) {
        if (!std::isfinite(x)) throw Error(ErrorKind::invalid_argument, "sample contains non-finite values");
    }
    const MomentAccumulator acc = moments_of(sample);
    if (!(acc.m2 > 0.0)) throw Error(ErrorKind::degenerate_sample, "sample has zero variance");

    StatsReport r;
    r.n = sample.size();
    r.mean = acc.mean;
    r.variance = acc.variance();
    r.skewness = acc.skewness();
    r.excess_kurtosis = acc.excess_kurtosis();
    std::tie(r.jb_stat, r.jb_p) = jarque_bera(r.n, r.skewness, r.excess_kurtosis);

    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double nd = static_cast<double>(r.n);

    const boost::math::normal_distribution<double> fitted(r.mean, std::sqrt(r.variance));
    double d = 0.0;
    for (std::size_t i = 0; i < r.n; ++i) {
        const double f = boost::math::cdf(fitted, sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / nd, static_cast<double>(i + 1) / nd - f});
    }
    r.ks_stat = d;
    r.ks_p = kolmogorov_pvalue(std::sqrt(nd) * d);

    const boost::math::normal_distribution<double> unit(0.0, 1.0);
    const std::size_t stride =
        opt.max_qq_points == 0 ? 1 : std::max<std::size_t>(1, r.n / opt.max_qq_points);
    for (std::size_t i = 0; i < r.n; i += stride) {
        const double pos = (static_cast<double>(i) + 0.5) / nd;
        r.qq.push_back({boost::math::quantile(unit, pos), sorted[i]});
    }

    const std::size_t bins = std::max<std::size_t>(1, opt.bins);
    const double lo = sorted.front();
    const double hi = sorted.back();
    const double width = (hi - lo) / static_cast<double>(bins);
    r.histogram.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) r.histogram.edges[b] = lo + width * static_cast<double>(b);
    r.histogram.edges.back() = hi;
    r.histogram.counts.assign(bins, 0);
    for (double x : sorted) {
        auto b = static_cast<std::size_t>((x - lo) / width);
        r.histogram.counts[std::min(b, bins - 1)] += 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Lindeberg ratio

struct WeightedSource {
    std::string label;
    double weight = 0.0;
    double variance = 0.0;  ///< of the source itself, before weighting
    bool gaussian = false;  ///< closed-form tail moments allowed
    std::vector<double> sample;  ///< optional empirical draws of the source
};

using WeightedSourceSet = std::vector<WeightedSource>;

struct LindebergResult {
    double ratio = 0.0;
    bool pass = false;
    double epsilon = 0.0;
    double threshold = 0.01;
    double total_variance = 0.0;  ///< varsigma^2
};

/// E[X^2 1{|X| > a}] for X ~ N(0, s^2).
inline double gaussian_tail_second_moment(double s, double a) {
    if (!(s > 0.0)) return 0.0;
    const double z = a / s;
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return 2.0 * s * s * (z * boost::math::pdf(unit, z) + boost::math::cdf(boost::math::complement(unit, z)));
}

/// ratio = sum_i E[xi_i^2 1{|xi_i| > eps varsigma}] / varsigma^2 with
/// xi_i = w_i (X_i - E X_i). Empirical samples are centred and used by direct
/// summation; their variance replaces the declared one. Gaussian sources
/// without a sample use the closed form.
inline LindebergResult lindeberg_ratio(const WeightedSourceSet& sources, double epsilon,
                                       double threshold = 0.01) {
    if (sources.size() < 2) {
        throw Error(ErrorKind::insufficient_sources, "Lindeberg ratio needs at least 2 sources");
    }
    if (!(epsilon > 0.0)) throw Error(ErrorKind::invalid_argument, "epsilon must be > 0");

    struct Prepared {
        double var_xi = 0.0;
        std::vector<double> centred;
    };
    std::vector<Prepared> prep(sources.size());
    double total = 0.0;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const auto& s = sources[i];
        if (!std::isfinite(s.weight) || !std::isfinite(s.variance) || s.variance < 0.0) {
            throw Error(ErrorKind::invalid_argument, "source '" + s.label + "' has invalid weight or variance");
        }
        if (!s.sample.empty()) {
            const double mean = moments_of(s.sample).mean;
            double ss = 0.0;
            prep[i].centred.reserve(s.sample.size());
            for (double x : s.sample) {
                const double xi = s.weight * (x - mean);
                prep[i].centred.push_back(xi);
                ss += xi * xi;
            }
            prep[i].var_xi = ss / static_cast<double>(s.sample.size());
        } else if (s.gaussian) {
            prep[i].var_xi = s.weight * s.weight * s.variance;
        } else {
            throw Error(ErrorKind::missing_distribution,
                        "source '" + s.label + "' has neither a sample nor a closed form");
        }
        total += prep[i].var_xi;
    }

    LindebergResult res;
    res.epsilon = epsilon;
    res.threshold = threshold;
    res.total_variance = total;
    if (!(total > 0.0)) {
        res.ratio = 0.0;
        res.pass = true;
        return res;
    }
    const double cut = epsilon * std::sqrt(total);
    double tail = 0.0;
    for (const auto& p : prep) {
        if (!p.centred.empty()) {
            double acc = 0.0;
            for (double xi : p.centred) {
                if (std::abs(xi) > cut) acc += xi * xi;
            }
            tail += acc / static_cast<double>(p.centred.size());
        } else {
            tail += gaussian_tail_second_moment(std::sqrt(p.var_xi), cut);
        }
    }
    res.ratio = std::clamp(tail / total, 0.0, 1.0);
    res.pass = res.ratio < threshold;
    return res;
}

// ---------------------------------------------------------------------------
// Dominance analysis

/// Stationary variance of the injection level produced by a noise model.
inline double stationary_variance(const NoiseModel& m, double dt) {
    if (m.kind == NoiseKind::ou_weibull_mapped) return weibull_variance(m.weibull_shape, m.weibull_scale);
    return m.sigma * m.sigma / (m.lambda * (2.0 - m.lambda * dt));
}

/// Variance of one Euler-Maruyama increment of a Gaussian OU source.
inline double gaussian_increment_variance(const NoiseModel& m, double dt) {
    return m.sigma * m.sigma * dt * 2.0 / (2.0 - m.lambda * dt);
}

/// Sign of the third moment of the source's marginal: 0 for Gaussian.
inline int source_skew_sign(const NoiseModel& m) {
    if (m.kind == NoiseKind::ou_gaussian) return 0;
    const double g = weibull_skewness(m.weibull_shape);
    const int s = g > 0.0 ? 1 : (g < 0.0 ? -1 : 0);
    return m.mirror ? -s : s;
}

struct DominanceRow {
    std::size_t model_index = 0;
    std::size_t bus = 0;
    bool reactive = false;
    double weight = 0.0;
    double variance = 0.0;  ///< stationary level variance of the source
    double share = 0.0;     ///< w^2 var / sum over sources
    int skew_sign = 0;      ///< sign(w) * sign(source skew)
};

/// Ranked by variance share, largest first.
inline std::vector<DominanceRow> dominance_analysis(const PropagationMap& map,
                                                    std::span<const NoiseModel> noise, double dt) {
    std::vector<DominanceRow> rows;
    double total = 0.0;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        const auto& m = noise[i];
        validate_noise(m, static_cast<std::size_t>(map.w_p.size()));
        for (bool reactive : {false, true}) {
            if (reactive && m.target == NoiseTarget::p) continue;
            if (!reactive && m.target == NoiseTarget::q) continue;
            DominanceRow r;
            r.model_index = i;
            r.bus = m.bus;
            r.reactive = reactive;
            r.weight = reactive ? map.w_q(static_cast<Eigen::Index>(m.bus))
                                : map.w_p(static_cast<Eigen::Index>(m.bus));
            r.variance = stationary_variance(m, dt);
            const int ws = r.weight > 0.0 ? 1 : (r.weight < 0.0 ? -1 : 0);
            r.skew_sign = ws * source_skew_sign(m);
            total += r.weight * r.weight * r.variance;
            rows.push_back(r);
        }
    }
    for (auto& r : rows) r.share = total > 0.0 ? r.weight * r.weight * r.variance / total : 0.0;
    std::stable_sort(rows.begin(), rows.end(),
                     [](const DominanceRow& a, const DominanceRow& b) { return a.share > b.share; });
    return rows;
}

// ---------------------------------------------------------------------------
// Aggregation experiment

struct AggregationSpec {
    SubnetSpec subnet;
    std::uint64_t network_seed = 7;
    PropagationMode mode = PropagationMode::full;
    double lambda = 1.0;
    double sigma_per_pu = 0.2;  ///< OU diffusion per pu of load size
    /// Dominant load: stationary variance relative to the mean load variance.
    double dominant_variance_multiplier = 100.0;
    NoiseKind dominant_kind = NoiseKind::ou_weibull_mapped;
    double dominant_weibull_shape = 1.0;
    double epsilon = 0.1;
    double lindeberg_threshold = 0.01;
};

struct AggregationCase {
    StatsReport report;
    LindebergResult lindeberg;
    double max_share = 0.0;
};

struct AggregationResult {
    AggregationCase uniform;
    AggregationCase dominant;
    std::size_t dominant_bus = 0;
    std::size_t n_buses = 0;
    std::size_t n_sources = 0;
};

inline AggregationSpec aggregation_spec_from_json(const nlohmann::json& j) {
    AggregationSpec s;
    try {
        if (j.contains("attach_bus")) s.subnet.attach_bus = detail::external_id(j, "attach_bus");
        s.subnet.n_buses = j.value("n_buses", s.subnet.n_buses);
        s.subnet.n_loads = j.value("n_loads", s.subnet.n_loads);
        s.subnet.extra_links = j.value("extra_links", s.subnet.extra_links);
        s.subnet.x_min = j.value("x_min", s.subnet.x_min);
        s.subnet.x_max = j.value("x_max", s.subnet.x_max);
        s.subnet.r_over_x = j.value("r_over_x", s.subnet.r_over_x);
        s.subnet.load_p_min = j.value("load_p_min", s.subnet.load_p_min);
        s.subnet.load_p_max = j.value("load_p_max", s.subnet.load_p_max);
        s.subnet.load_q_ratio = j.value("load_q_ratio", s.subnet.load_q_ratio);
        s.network_seed = j.value("network_seed", s.network_seed);
        s.lambda = j.value("lambda", s.lambda);
        s.sigma_per_pu = j.value("sigma_per_pu", s.sigma_per_pu);
        s.dominant_variance_multiplier = j.value("dominant_variance_multiplier", s.dominant_variance_multiplier);
        s.dominant_kind = detail::parse_kind(j.value("dominant_kind", std::string("ou_weibull_mapped")));
        s.dominant_weibull_shape = j.value("dominant_weibull_shape", s.dominant_weibull_shape);
        s.epsilon = j.value("epsilon", s.epsilon);
        s.lindeberg_threshold = j.value("lindeberg_threshold", s.lindeberg_threshold);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::invalid_argument, std::string("malformed subnet settings: ") + e.what());
    }
    return s;
}

/// Noise models of the subnet loads (Gaussian OU with sigma proportional to
/// load size) and the dominant load placed at the subnet bus with the largest
/// |w_p|, sized to the requested multiple of the mean load variance.
struct AggregationNoise {
    std::vector<NoiseModel> uniform;
    std::vector<NoiseModel> dominant;  ///< uniform plus the dominant source, last
    std::size_t dominant_bus = 0;
};

inline AggregationNoise aggregation_noise(const SubnetNetwork& sub, const PropagationMap& map,
                                          const AggregationSpec& spec, double dt) {
    AggregationNoise out;
    double mean_var = 0.0;
    for (const auto& load : sub.loads) {
        NoiseModel m;
        m.bus = load.bus;
        m.kind = NoiseKind::ou_gaussian;
        m.lambda = spec.lambda;
        m.sigma = spec.sigma_per_pu * load.p;
        out.uniform.push_back(m);
        mean_var += stationary_variance(m, dt);
    }
    mean_var /= static_cast<double>(sub.loads.size());

    std::size_t best = sub.first_subnet_bus;
    for (std::size_t b = sub.first_subnet_bus; b < sub.net.size(); ++b) {
        if (std::abs(map.w_p(static_cast<Eigen::Index>(b))) >
            std::abs(map.w_p(static_cast<Eigen::Index>(best)))) {
            best = b;
        }
    }
    out.dominant_bus = best;
    NoiseModel d;
    d.bus = best;
    d.kind = spec.dominant_kind;
    d.lambda = spec.lambda;
    const double target_var = spec.dominant_variance_multiplier * mean_var;
    if (d.kind == NoiseKind::ou_gaussian) {
        d.sigma = std::sqrt(target_var * d.lambda * (2.0 - d.lambda * dt));
    } else {
        d.weibull_shape = spec.dominant_weibull_shape;
        d.weibull_scale = std::sqrt(target_var / weibull_variance(d.weibull_shape, 1.0));
    }
    out.dominant = out.uniform;
    out.dominant.push_back(d);
    return out;
}

/// Lindeberg source set for pooled increments: Gaussian sources in closed
/// form, others from one regenerated increment series of path 0.
inline WeightedSourceSet increment_sources(std::span<const NoiseModel> noise, const PropagationMap& map,
                                           double dt, std::size_t n_steps, std::uint64_t seed) {
    WeightedSourceSet set;
    for (std::size_t i = 0; i < noise.size(); ++i) {
        const auto& m = noise[i];
        for (bool reactive : {false, true}) {
            if (reactive && m.target == NoiseTarget::p) continue;
            if (!reactive && m.target == NoiseTarget::q) continue;
            WeightedSource s;
            s.label = "bus" + std::to_string(m.bus + 1) + (reactive ? ":q" : ":p") + "#" + std::to_string(i);
            s.weight = reactive ? map.w_q(static_cast<Eigen::Index>(m.bus)) : map.w_p(static_cast<Eigen::Index>(m.bus));
            if (m.kind == NoiseKind::ou_gaussian) {
                s.gaussian = true;
                s.variance = gaussian_increment_variance(m, dt);
            } else {
                Philox4x32 rng(seed, 0, stream_id(i, reactive));
                const OuSeries series = generate_noise(m, dt, n_steps, rng);
                s.sample.assign(series.increment.data(), series.increment.data() + series.increment.size());
                s.variance = moments_of(s.sample).population_variance();
            }
            set.push_back(std::move(s));
        }
    }
    return set;
}

/// Runs the uniform and the dominant-load case on the same synthetic subnet
/// and reports on the pooled CoI frequency increments.
inline AggregationResult aggregation_experiment(const Network& host, const AggregationSpec& spec,
                                                double dt, std::size_t n_steps, std::size_t n_paths,
                                                std::uint64_t base_seed, unsigned threads = 0) {
    const SubnetNetwork sub = attach_subnetwork(host, spec.subnet, spec.network_seed);
    const PropagationMap map = make_propagation_map(sub.net, spec.mode);
    const AggregationNoise noise = aggregation_noise(sub, map, spec, dt);

    AggregationResult res;
    res.dominant_bus = noise.dominant_bus;
    res.n_buses = sub.net.size();
    res.n_sources = noise.uniform.size();

    MonteCarloOptions mc;
    mc.n_paths = n_paths;
    mc.base_seed = base_seed;
    mc.threads = threads;
    auto run_case = [&](const std::vector<NoiseModel>& models) {
        AggregationCase c;
        const Ensemble ens = monte_carlo(models, map, dt, n_steps, mc);
        c.report = normality_report(ens.pooled_increments, {50, 2000});
        c.lindeberg = lindeberg_ratio(increment_sources(models, map, dt, n_steps, base_seed), spec.epsilon,
                                      spec.lindeberg_threshold);
        for (const auto& row : dominance_analysis(map, models, dt)) c.max_share = std::max(c.max_share, row.share);
        return c;
    };
    res.uniform = run_case(noise.uniform);
    res.dominant = run_case(noise.dominant);
    return res;
}

}  // namespace freqflux
