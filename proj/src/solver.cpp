#include "latheat/solver.hpp"

#include <algorithm>
#include <cmath>

#include "latheat/fourier.hpp"

namespace latheat {

namespace {

void check_grid(const SampledCoefficient& c, double horizon, int steps, const char* what) {
    if (c.grid.count != steps + 1 || c.grid.t0 != 0.0 ||
        std::abs(c.grid.dt * steps - horizon) > 1e-12 * std::max(1.0, horizon))
        throw shape_error(std::string("solve: ") + what + " is not sampled on the solver grid");
    for (double v : c.values)
        if (!std::isfinite(v)) throw invalid_input(std::string(what) + ": non-finite sample");
}

} // namespace

Trajectory solve(const GridFunction& u0, const SourceTerm& source, const SampledCoefficient& a,
                 const SampledCoefficient& b, const SolveConfig& cfg) {
    const LatticeSpec& spec = u0.spec();

    if (cfg.horizon < 0.0) throw invalid_input("solve: negative horizon");
    if (cfg.horizon == 0.0) {
        Trajectory traj;
        traj.times = {0.0};
        traj.states.push_back(u0);
        if (cfg.keep_spectral) traj.spectral_states.push_back(forward(u0));
        if (cfg.norm_history) {
            traj.history_times = {0.0};
            traj.norm_history = {weighted_norm(u0, cfg.weight_order)};
        }
        return traj;
    }

    const int nt = cfg.time_steps;
    if (nt < 2 || nt % 2 != 0) throw invalid_input("solve: time_steps must be even and >= 2");
    check_grid(a, cfg.horizon, nt, "a");
    check_grid(b, cfg.horizon, nt, "b");
    strict_positivity_check(a);
    if (source.is_separable()) {
        if (source.profile->spec() != spec) throw shape_error("solve: source profile lattice");
        if (static_cast<int>(source.factor.size()) != nt + 1)
            throw shape_error("solve: source factor not sampled on the solver grid");
    } else if (!source.is_zero()) {
        if (static_cast<int>(source.samples.size()) != nt + 1)
            throw shape_error("solve: source not sampled on the solver grid");
        for (const GridFunction& g : source.samples)
            if (g.spec() != spec) throw shape_error("solve: source sample lattice");
    }

    std::vector<int> outputs = cfg.output_nodes;
    if (outputs.empty()) {
        for (int i = 0; i <= nt; i += 2) outputs.push_back(i);
    }
    for (int node : outputs)
        if (node < 0 || node > nt || node % 2 != 0)
            throw invalid_input("solve: output nodes must be even grid indices");
    if (!std::is_sorted(outputs.begin(), outputs.end()))
        throw invalid_input("solve: output nodes must be sorted");

    const bool history = cfg.norm_history;
    if (history && nt % 4 != 0)
        throw invalid_input("solve: norm_history needs time_steps divisible by 4");

    const double dt = cfg.horizon / nt;

    // Mode-independent cumulative integrals A, B at all nodes.
    const std::vector<double> accA = cumulative_integral(a.values, dt);
    const std::vector<double> accB = cumulative_integral(b.values, dt);

    const SymbolField sym = cfg.symbol == SymbolChoice::lattice
                                ? lattice_symbol(spec, cfg.alpha)
                                : continuous_symbol(spec, cfg.alpha);

    const SpectralFunction u0_hat = forward(u0);
    std::optional<SpectralFunction> f_hat;        // separable profile
    std::vector<SpectralFunction> f_hat_samples;  // general sampled source
    if (source.is_separable()) {
        f_hat = forward(*source.profile);
    } else if (!source.is_zero()) {
        f_hat_samples.reserve(source.samples.size());
        for (const GridFunction& g : source.samples) f_hat_samples.push_back(forward(g));
    }

    const std::size_t modes = spec.site_count();
    const std::size_t n_out = outputs.size();
    const int n_hist = history ? nt / 2 + 1 : 0;

    // Per-output spectral data, gathered mode-major then transposed.
    std::vector<std::vector<complex_t>> out_hat(n_out, std::vector<complex_t>(modes));
    // Deterministic block reduction for the norm history.
    const std::size_t nblocks = (modes + kReduceBlock - 1) / kReduceBlock;
    std::vector<std::vector<double>> hist_blocks;
    const bool diag_history = history && cfg.weight_order == 0.0;
    std::vector<std::vector<complex_t>> hist_hat; // kept only when s != 0
    if (history) {
        if (diag_history)
            hist_blocks.assign(nblocks, std::vector<double>(static_cast<std::size_t>(n_hist), 0.0));
        else
            hist_hat.assign(static_cast<std::size_t>(n_hist), std::vector<complex_t>(modes));
    }

    double max_step_exponent = 0.0;
    const double cell = spec.dual_cell_volume();

    // Parallel over fixed mode blocks: each block's history row is written by
    // exactly one thread, in ascending mode order, so the reduction is
    // deterministic for any thread count.
#pragma omp parallel reduction(max : max_step_exponent)
    {
        std::vector<double> phi(static_cast<std::size_t>(nt) + 1);
#pragma omp for schedule(static)
        for (long long blk = 0; blk < static_cast<long long>(nblocks); ++blk) {
            const std::size_t mode_lo = static_cast<std::size_t>(blk) * kReduceBlock;
            const std::size_t mode_hi = std::min(mode_lo + kReduceBlock, modes);
            for (std::size_t mode = mode_lo; mode < mode_hi; ++mode) {
                const double nu2 = sym.values[mode];
                for (int i = 0; i <= nt; ++i)
                    phi[static_cast<std::size_t>(i)] =
                        nu2 * accA[static_cast<std::size_t>(i)] + accB[static_cast<std::size_t>(i)];
                for (int i = 0; i < nt; ++i)
                    max_step_exponent = std::max(
                        max_step_exponent, std::abs(phi[static_cast<std::size_t>(i) + 1] -
                                                    phi[static_cast<std::size_t>(i)]));

                const complex_t uh0 = u0_hat[mode];
                const complex_t fh = f_hat ? (*f_hat)[mode] : complex_t(0.0);
                auto fhat_at = [&](std::size_t node) {
                    return f_hat ? fh * source.factor[node] : f_hat_samples[node][mode];
                };

                complex_t duhamel = 0.0;
                std::size_t out_cursor = 0;
                auto emit = [&](int node, complex_t value) {
                    while (out_cursor < n_out && outputs[out_cursor] == node)
                        out_hat[out_cursor++][mode] = value;
                    if (history && node % 2 == 0) {
                        const int h = node / 2;
                        if (diag_history) {
                            hist_blocks[static_cast<std::size_t>(blk)][static_cast<std::size_t>(h)] +=
                                cell * std::norm(value);
                        } else {
                            hist_hat[static_cast<std::size_t>(h)][mode] = value;
                        }
                    }
                };

                emit(0, uh0);
                for (int i = 0; i + 2 <= nt; i += 2) {
                    const std::size_t s0 = static_cast<std::size_t>(i);
                    // Exponents stay nonpositive up to the |b| slack, so
                    // nothing overflows; huge phi increments underflow to
                    // exact zeros.
                    const double e0 = std::exp(phi[s0] - phi[s0 + 2]);
                    const double e1 = std::exp(phi[s0 + 1] - phi[s0 + 2]);
                    if (!source.is_zero()) {
                        duhamel = duhamel * e0 +
                                  dt / 3.0 *
                                      (fhat_at(s0) * e0 + 4.0 * fhat_at(s0 + 1) * e1 +
                                       fhat_at(s0 + 2));
                    }
                    const complex_t value = uh0 * std::exp(-phi[s0 + 2]) + duhamel;
                    emit(i + 2, value);
                }
            }
        }
    }

    Trajectory traj;
    traj.max_step_exponent = max_step_exponent;
    for (std::size_t o = 0; o < n_out; ++o) {
        traj.times.push_back(outputs[o] * dt);
        SpectralFunction sf(spec, std::move(out_hat[o]), SpectralFunction::unchecked{});
        traj.states.push_back(inverse(sf));
        if (cfg.keep_spectral) traj.spectral_states.push_back(std::move(sf));
    }
    if (history) {
        traj.history_times.resize(static_cast<std::size_t>(n_hist));
        traj.norm_history.resize(static_cast<std::size_t>(n_hist));
        for (int h = 0; h < n_hist; ++h)
            traj.history_times[static_cast<std::size_t>(h)] = 2.0 * h * dt;
        if (diag_history) {
            // || u(t) ||_{l2}^2 = cell * sum_xi |u^(t,xi)|^2; fold the fixed
            // blocks pairwise per time node.
            for (int h = 0; h < n_hist; ++h) {
                std::vector<double> parts(nblocks);
                for (std::size_t b2 = 0; b2 < nblocks; ++b2)
                    parts[b2] = hist_blocks[b2][static_cast<std::size_t>(h)];
                traj.norm_history[static_cast<std::size_t>(h)] =
                    std::sqrt(detail::pairwise_fold(std::span<double>(parts)));
            }
        } else {
            for (int h = 0; h < n_hist; ++h) {
                SpectralFunction sf(spec, std::move(hist_hat[static_cast<std::size_t>(h)]),
                                    SpectralFunction::unchecked{});
                traj.norm_history[static_cast<std::size_t>(h)] =
                    weighted_norm(inverse(sf), cfg.weight_order);
            }
        }
    }
    return traj;
}

double energy(const Trajectory& traj, const SampledCoefficient& a, double s,
              std::size_t output_index) {
    if (output_index >= traj.times.size()) throw invalid_input("energy: output index");
    const double t = traj.times[output_index];
    // a is scalar in t, so the weighted inner product collapses to
    // a(t) * ||u^(t,.)||_{H^s}^2 = a(t) * ||u(t,.)||_{l2_s}^2.
    const int node = static_cast<int>(std::llround((t - a.grid.t0) / a.grid.dt));
    if (node < 0 || node >= a.grid.count || std::abs(a.grid.node(node) - t) > 1e-10)
        throw invalid_input("energy: time not on the coefficient grid");
    const double nrm = weighted_norm(traj.states[output_index], s);
    return a.values[static_cast<std::size_t>(node)] * nrm * nrm;
}

double wellposedness_constant(const SampledCoefficient& a, const SampledCoefficient& b,
                              double horizon) {
    const double a0 = strict_positivity_check(a);
    const double sup_a = a.sup_abs_value();
    const double sup_at = a.sup_abs_derivative();
    const double sup_b = b.sup_abs_value();
    return sup_a / a0 *
           std::exp((sup_at + 2.0 * sup_a * sup_b + sup_a) * horizon / a0);
}

EstimateReport verify_estimate(const Trajectory& traj, const GridFunction& u0,
                               const SourceTerm& source, const SampledCoefficient& a,
                               const SampledCoefficient& b, double s) {
    EstimateReport rep;
    const double horizon = traj.times.empty() ? 0.0 : traj.times.back();
    rep.constant = wellposedness_constant(a, b, horizon);
    const double u0n = weighted_norm(u0, s);
    const double fn = source.is_zero() || a.grid.count < 2
                          ? 0.0
                          : source_l2_norm(source, s, a.grid.dt);
    rep.data_norm_sq = u0n * u0n + fn * fn;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const double un = weighted_norm(traj.states[i], s);
        rep.ratios.push_back(rep.data_norm_sq == 0.0
                                 ? 0.0
                                 : un * un / (rep.constant * rep.data_norm_sq));
    }
    rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.pass = rep.max_ratio <= 1.0 + 1e-8;
    return rep;
}

double l2_time_norm(const Trajectory& traj) {
    if (traj.norm_history.size() < 3)
        throw invalid_input("l2_time_norm: trajectory has no recorded norm history");
    std::vector<double> sq(traj.norm_history.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = traj.norm_history[i] * traj.norm_history[i];
    const double dt = traj.history_times[1] - traj.history_times[0];
    return std::sqrt(simpson_integral(sq, dt));
}

double source_l2_norm(const SourceTerm& source, double s, double dt) {
    if (source.is_zero()) return 0.0;
    if (source.is_separable()) {
        const double pn = weighted_norm(*source.profile, s);
        std::vector<double> g2(source.factor.size());
        for (std::size_t i = 0; i < g2.size(); ++i) g2[i] = source.factor[i] * source.factor[i];
        return pn * std::sqrt(simpson_integral(g2, dt));
    }
    std::vector<double> g2(source.samples.size());
    for (std::size_t i = 0; i < g2.size(); ++i) {
        const double n = weighted_norm(source.samples[i], s);
        g2[i] = n * n;
    }
    return std::sqrt(simpson_integral(g2, dt));
}

} // namespace latheat
