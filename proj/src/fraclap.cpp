#include "latheat/fraclap.hpp"

#include <algorithm>
#include <cmath>

#include "latheat/fourier.hpp"

namespace latheat {

std::size_t StencilKernel::coeff_count() const {
    std::size_t c = 1;
    for (int d = 0; d < dim; ++d) c *= side();
    return c;
}

double StencilKernel::coeff(std::span<const int> j) const {
    if (static_cast<int>(j.size()) != dim) throw shape_error("StencilKernel::coeff: arity");
    std::size_t flat = 0;
    for (int d = 0; d < dim; ++d) {
        const int i = j[d] + radius;
        if (i < 0 || i >= static_cast<int>(side()))
            throw invalid_input("StencilKernel::coeff: index outside the kept box");
        flat = flat * side() + static_cast<std::size_t>(i);
    }
    return coeffs[flat];
}

double StencilKernel::row_sum() const {
    double acc = 0.0;
    for (double a : coeffs) acc += a;
    return acc;
}

namespace {

// Plain in-place DFT over every axis of an M^n array in wrapped (standard)
// layout. sign = +1 for the synthesis direction used by the kernel build.
void dft_axes_wrapped(std::vector<complex_t>& data, int dim, int M, int sign) {
    const bool pow2 = (M & (M - 1)) == 0;
    std::vector<complex_t> roots(static_cast<std::size_t>(M));
    for (int k = 0; k < M; ++k)
        roots[static_cast<std::size_t>(k)] = std::polar(1.0, sign * 2.0 * kPi * k / M);

    std::vector<int> bitrev;
    if (pow2) {
        bitrev.resize(static_cast<std::size_t>(M));
        int log2n = 0;
        while ((1 << log2n) < M) ++log2n;
        for (int i = 0; i < M; ++i) {
            int r = 0;
            for (int b = 0; b < log2n; ++b)
                if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
            bitrev[static_cast<std::size_t>(i)] = r;
        }
    }

    std::size_t stride = 1;
    for (int d = 0; d < dim; ++d) stride *= static_cast<std::size_t>(M);
    stride /= static_cast<std::size_t>(M); // stride of axis 0

    for (int axis = 0; axis < dim; ++axis) {
        const std::size_t lines = data.size() / static_cast<std::size_t>(M);
#pragma omp parallel
        {
            std::vector<complex_t> buf(static_cast<std::size_t>(M));
            std::vector<complex_t> scratch(pow2 ? 0 : static_cast<std::size_t>(M));
#pragma omp for schedule(static)
            for (long long line = 0; line < static_cast<long long>(lines); ++line) {
                const std::size_t l = static_cast<std::size_t>(line);
                const std::size_t base =
                    (l / stride) * stride * static_cast<std::size_t>(M) + (l % stride);
                for (int i = 0; i < M; ++i)
                    buf[static_cast<std::size_t>(i)] = data[base + stride * i];
                if (pow2) {
                    for (int i = 0; i < M; ++i) {
                        const int r = bitrev[static_cast<std::size_t>(i)];
                        if (i < r) std::swap(buf[i], buf[r]);
                    }
                    for (int len = 2; len <= M; len <<= 1) {
                        const int step = M / len;
                        for (int b = 0; b < M; b += len) {
                            for (int j = 0; j < len / 2; ++j) {
                                const complex_t u = buf[b + j];
                                const complex_t v =
                                    buf[b + j + len / 2] * roots[static_cast<std::size_t>(j * step)];
                                buf[b + j] = u + v;
                                buf[b + j + len / 2] = u - v;
                            }
                        }
                    }
                } else {
                    for (int p = 0; p < M; ++p) {
                        complex_t acc = 0.0;
                        for (int j = 0; j < M; ++j)
                            acc += buf[j] * roots[static_cast<std::size_t>(
                                       static_cast<long long>(j) * p % M)];
                        scratch[p] = acc;
                    }
                    std::swap(buf, scratch);
                }
                for (int i = 0; i < M; ++i)
                    data[base + stride * i] = buf[static_cast<std::size_t>(i)];
            }
        }
        stride /= static_cast<std::size_t>(M);
    }
}

} // namespace

StencilKernel stencil_coefficients(double alpha, int dim, int radius, int quad_points,
                                   TailPolicy policy) {
    if (!(alpha > 0.0)) throw invalid_input("stencil_coefficients: alpha must be positive");
    if (dim < 1 || dim > kMaxDim) throw invalid_input("stencil_coefficients: dim out of range");
    if (radius < 1) throw invalid_input("stencil_coefficients: radius must be >= 1");
    const int M = quad_points;
    if (M < 2 * radius + 2)
        throw invalid_input(
            "stencil_coefficients: quadrature points must be >= 2*radius + 2 (aliasing)");

    // Symbol samples on the wrapped M^n grid; the periodic trapezoidal rule for
    // a_j is the inverse discrete transform of these samples.
    std::size_t total = 1;
    for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(M);
    std::vector<complex_t> samples(total);
#pragma omp parallel for schedule(static)
    for (long long q = 0; q < static_cast<long long>(total); ++q) {
        std::size_t rest = static_cast<std::size_t>(q);
        double symbol = 0.0;
        for (int d = dim - 1; d >= 0; --d) {
            const int qd = static_cast<int>(rest % static_cast<std::size_t>(M));
            rest /= static_cast<std::size_t>(M);
            const double sn = std::sin(kPi * qd / M);
            symbol += 4.0 * sn * sn;
        }
        samples[static_cast<std::size_t>(q)] = std::pow(symbol, alpha);
    }
    dft_axes_wrapped(samples, dim, M, +1);
    const double inv_total = 1.0 / static_cast<double>(total);

    StencilKernel kernel;
    kernel.alpha = alpha;
    kernel.dim = dim;
    kernel.radius = radius;
    kernel.quad_points = M;
    kernel.policy = policy;
    kernel.coeffs.assign(kernel.coeff_count(), 0.0);

    const int R = radius;
    const int side = 2 * R + 1;
    double tail_abs = 0.0, tail_signed = 0.0, max_imag = 0.0;

    std::vector<int> wrapped(static_cast<std::size_t>(dim), 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int d = dim - 1; d >= 0; --d) {
            const int q = static_cast<int>(rest % static_cast<std::size_t>(M));
            rest /= static_cast<std::size_t>(M);
            wrapped[static_cast<std::size_t>(d)] = q < M / 2 ? q : q - M;
        }
        const complex_t z = samples[flat] * inv_total;
        max_imag = std::max(max_imag, std::abs(z.imag()));
        const double a = z.real();

        bool inside = true;
        for (int d = 0; d < dim; ++d)
            if (std::abs(wrapped[static_cast<std::size_t>(d)]) > R) inside = false;

        if (!inside) {
            tail_abs += std::abs(a);
            tail_signed += a;
        }

        if (policy == TailPolicy::truncate_report) {
            if (!inside) continue;
            std::size_t idx = 0;
            for (int d = 0; d < dim; ++d)
                idx = idx * static_cast<std::size_t>(side) +
                      static_cast<std::size_t>(wrapped[static_cast<std::size_t>(d)] + R);
            kernel.coeffs[idx] += a;
        } else {
            // fold_periodic: reduce modulo 2R into [-R, R); the -R class is
            // shared with +R, so split it evenly to preserve a_j = a_{-j}.
            double weight = 1.0;
            std::array<int, kMaxDim> folded{};
            std::array<bool, kMaxDim> edge{};
            for (int d = 0; d < dim; ++d) {
                int m = wrapped[static_cast<std::size_t>(d)] % (2 * R);
                if (m >= R) m -= 2 * R;
                if (m < -R) m += 2 * R;
                edge[static_cast<std::size_t>(d)] = (m == -R);
                if (m == -R) weight *= 0.5;
                folded[static_cast<std::size_t>(d)] = m;
            }
            // Distribute over the 2^(edge axes) box corners.
            const int edges = static_cast<int>(
                std::count(edge.begin(), edge.begin() + dim, true));
            for (int corner = 0; corner < (1 << edges); ++corner) {
                std::size_t idx = 0;
                int bit = 0;
                for (int d = 0; d < dim; ++d) {
                    int m = folded[static_cast<std::size_t>(d)];
                    if (edge[static_cast<std::size_t>(d)]) {
                        if (corner & (1 << bit)) m = R;
                        ++bit;
                    }
                    idx = idx * static_cast<std::size_t>(side) + static_cast<std::size_t>(m + R);
                }
                kernel.coeffs[idx] += weight * a;
            }
        }
    }

    if (max_imag > 1e-13)
        throw numeric_error("stencil_coefficients: imaginary residue exceeds 1e-13");
    kernel.max_imag_residue = max_imag;
    kernel.tail_mass = tail_abs;

    // The integrand is even, so a_j = a_{-j} holds exactly; average away the
    // last-bit asymmetry of the transform's distinct butterfly paths.
    for (std::size_t flat = 0; flat < kernel.coeffs.size(); ++flat) {
        std::size_t rest = flat, mirror = 0;
        for (int d = dim - 1; d >= 0; --d) {
            const int jd = static_cast<int>(rest % static_cast<std::size_t>(side)) - R;
            rest /= static_cast<std::size_t>(side);
            std::size_t axis_stride = 1;
            for (int dd = dim - 1; dd > d; --dd) axis_stride *= static_cast<std::size_t>(side);
            mirror += static_cast<std::size_t>(-jd + R) * axis_stride;
        }
        if (mirror > flat) {
            const double avg = 0.5 * (kernel.coeffs[flat] + kernel.coeffs[mirror]);
            kernel.coeffs[flat] = avg;
            kernel.coeffs[mirror] = avg;
        }
    }
    // The full kernel sums to the symbol at zero, which vanishes: the row sum
    // is zero under fold_periodic and -tail_signed under truncate_report.
    kernel.tail_signed = tail_signed;
    return kernel;
}

GridFunction apply_stencil(const GridFunction& f, const StencilKernel& kernel) {
    const LatticeSpec& spec = f.spec();
    if (kernel.dim != spec.dim) throw shape_error("apply_stencil: dimension mismatch");
    const int R = kernel.radius;
    const int N = spec.points;
    std::vector<complex_t> out(f.size());
    const auto in = f.values();

#pragma omp parallel for schedule(static)
    for (long long s = 0; s < static_cast<long long>(out.size()); ++s) {
        const std::size_t site = static_cast<std::size_t>(s);
        std::array<int, kMaxDim> base{};
        for (int d = 0; d < spec.dim; ++d)
            base[static_cast<std::size_t>(d)] = signed_component(spec, site, d) + N / 2;

        std::array<int, kMaxDim> j{};
        for (int d = 0; d < spec.dim; ++d) j[static_cast<std::size_t>(d)] = -R;

        complex_t acc = 0.0;
        for (std::size_t c = 0; c < kernel.coeffs.size(); ++c) {
            const double a = kernel.coeffs[c];
            if (a != 0.0) {
                std::size_t shifted = 0;
                for (int d = 0; d < spec.dim; ++d) {
                    int i = base[static_cast<std::size_t>(d)] + j[static_cast<std::size_t>(d)];
                    i = ((i % N) + N) % N;
                    shifted =
                        shifted * static_cast<std::size_t>(N) + static_cast<std::size_t>(i);
                }
                acc += a * in[shifted];
            }
            for (int d = spec.dim - 1; d >= 0; --d) {
                if (++j[static_cast<std::size_t>(d)] <= R) break;
                j[static_cast<std::size_t>(d)] = -R;
            }
        }
        out[site] = acc;
    }
    return GridFunction(spec, std::move(out), GridFunction::unchecked{});
}

SymbolField lattice_symbol(const LatticeSpec& spec, double alpha) {
    spec.validate();
    if (!(alpha > 0.0)) throw invalid_input("lattice_symbol: alpha must be positive");
    SymbolField sym{spec, alpha, false, std::vector<double>(spec.site_count())};
    const double scale = std::pow(spec.hbar, -2.0 * alpha);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(sym.values.size()); ++i) {
        double acc = 0.0;
        for (int d = 0; d < spec.dim; ++d) {
            // hbar*xi = m/N on the dual grid
            const double sn =
                std::sin(kPi * signed_component(spec, static_cast<std::size_t>(i), d) /
                         spec.points);
            acc += 4.0 * sn * sn;
        }
        sym.values[static_cast<std::size_t>(i)] = scale * std::pow(acc, alpha);
    }
    return sym;
}

SymbolField continuous_symbol(const LatticeSpec& spec, double alpha) {
    spec.validate();
    if (!(alpha > 0.0)) throw invalid_input("continuous_symbol: alpha must be positive");
    SymbolField sym{spec, alpha, true, std::vector<double>(spec.site_count())};
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(sym.values.size()); ++i) {
        const double r2 = freq_radius_sq(spec, static_cast<std::size_t>(i));
        sym.values[static_cast<std::size_t>(i)] = std::pow(4.0 * kPi * kPi * r2, alpha);
    }
    return sym;
}

GridFunction apply_spectral(const GridFunction& f, const SymbolField& sym, bool scaled) {
    if (f.spec() != sym.spec) throw shape_error("apply_spectral: lattice mismatch");
    const double factor =
        scaled || sym.continuous ? 1.0 : std::pow(f.spec().hbar, 2.0 * sym.alpha);
    SpectralFunction fh = forward(f);
    std::vector<complex_t> v(fh.values().begin(), fh.values().end());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(v.size()); ++i)
        v[static_cast<std::size_t>(i)] *= factor * sym.values[static_cast<std::size_t>(i)];
    return inverse(SpectralFunction(f.spec(), std::move(v), SpectralFunction::unchecked{}));
}

} // namespace latheat
