#include "latheat/fourier.hpp"

#include <algorithm>
#include <cmath>

namespace latheat {

namespace {

// Twiddle tables for one axis length: level tables for the radix-2 path, or a
// full w^k table for the direct path. Built once per transform call and
// shared read-only across lines.
struct AxisPlan {
    int n = 0;
    int sign = -1;
    bool pow2 = false;
    std::vector<std::vector<complex_t>> levels; // radix-2: per-length half tables
    std::vector<complex_t> roots;               // direct: w^k, k in [0, n)
    std::vector<int> bitrev;

    AxisPlan(int n_, int sign_) : n(n_), sign(sign_) {
        pow2 = (n & (n - 1)) == 0;
        if (pow2) {
            for (int len = 2; len <= n; len <<= 1) {
                std::vector<complex_t> t(static_cast<std::size_t>(len / 2));
                for (int j = 0; j < len / 2; ++j)
                    t[static_cast<std::size_t>(j)] =
                        std::polar(1.0, sign * 2.0 * kPi * j / len);
                levels.push_back(std::move(t));
            }
            bitrev.resize(static_cast<std::size_t>(n));
            int log2n = 0;
            while ((1 << log2n) < n) ++log2n;
            for (int i = 0; i < n; ++i) {
                int r = 0;
                for (int b = 0; b < log2n; ++b)
                    if (i & (1 << b)) r |= 1 << (log2n - 1 - b);
                bitrev[static_cast<std::size_t>(i)] = r;
            }
        } else {
            roots.resize(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k)
                roots[static_cast<std::size_t>(k)] = std::polar(1.0, sign * 2.0 * kPi * k / n);
        }
    }

    void transform(complex_t* line, complex_t* scratch) const {
        if (pow2) {
            for (int i = 0; i < n; ++i) {
                const int r = bitrev[static_cast<std::size_t>(i)];
                if (i < r) std::swap(line[i], line[r]);
            }
            int level = 0;
            for (int len = 2; len <= n; len <<= 1, ++level) {
                const auto& tw = levels[static_cast<std::size_t>(level)];
                for (int base = 0; base < n; base += len) {
                    for (int j = 0; j < len / 2; ++j) {
                        const complex_t u = line[base + j];
                        const complex_t v = line[base + j + len / 2] * tw[static_cast<std::size_t>(j)];
                        line[base + j] = u + v;
                        line[base + j + len / 2] = u - v;
                    }
                }
            }
        } else {
            for (int p = 0; p < n; ++p) {
                complex_t acc = 0.0;
                for (int j = 0; j < n; ++j)
                    acc += line[j] * roots[static_cast<std::size_t>((j * p) % n)];
                scratch[p] = acc;
            }
            std::copy(scratch, scratch + n, line);
        }
    }
};

// Transform every axis of the row-major array in place. The gather/scatter
// uses the involutive shift i <-> (i + N/2) mod N, converting between the
// natural signed order [-N/2, N/2) and the wrapped layout of the plain DFT,
// on both the input and output side of each axis.
void transform_all_axes(std::vector<complex_t>& data, const LatticeSpec& spec, int sign) {
    const int n = spec.points;
    const int half = n / 2;
    const AxisPlan plan(n, sign);
    for (int axis = 0; axis < spec.dim; ++axis) {
        const std::size_t stride = axis_stride(spec, axis);
        const std::size_t lines = data.size() / static_cast<std::size_t>(n);
#pragma omp parallel
        {
            std::vector<complex_t> buf(static_cast<std::size_t>(n));
            std::vector<complex_t> scratch(plan.pow2 ? 0 : static_cast<std::size_t>(n));
#pragma omp for schedule(static)
            for (long long line = 0; line < static_cast<long long>(lines); ++line) {
                const std::size_t l = static_cast<std::size_t>(line);
                const std::size_t base = (l / stride) * stride * static_cast<std::size_t>(n) +
                                         (l % stride);
                for (int i = 0; i < n; ++i)
                    buf[static_cast<std::size_t>(i)] =
                        data[base + stride * static_cast<std::size_t>((i + half) % n)];
                plan.transform(buf.data(), scratch.data());
                for (int i = 0; i < n; ++i)
                    data[base + stride * static_cast<std::size_t>((i + half) % n)] =
                        buf[static_cast<std::size_t>(i)];
            }
        }
    }
}

void scale_in_place(std::vector<complex_t>& data, double factor) {
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(data.size()); ++i)
        data[static_cast<std::size_t>(i)] *= factor;
}

} // namespace

SpectralFunction forward(const GridFunction& f) {
    const LatticeSpec& spec = f.spec();
    std::vector<complex_t> data(f.values().begin(), f.values().end());
    transform_all_axes(data, spec, -1);
    scale_in_place(data, std::pow(spec.hbar, 0.5 * spec.dim));
    return SpectralFunction(spec, std::move(data), SpectralFunction::unchecked{});
}

GridFunction inverse(const SpectralFunction& g) {
    const LatticeSpec& spec = g.spec();
    std::vector<complex_t> data(g.values().begin(), g.values().end());
    transform_all_axes(data, spec, +1);
    scale_in_place(data, std::pow(spec.hbar, 0.5 * spec.dim) * spec.dual_cell_volume());
    return GridFunction(spec, std::move(data), GridFunction::unchecked{});
}

double sobolev_norm(const SpectralFunction& g, double s) {
    return weighted_norm(inverse(g), s);
}

} // namespace latheat
