#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "latheat/numerics.hpp"

namespace latheat {

// ---------------------------------------------------------------------------
// Truncated periodic lattice geometry.
//
// Sites are k = hbar*m with multi-index m in [-N/2, N/2)^n, stored row-major
// (axis 0 slowest) with axis offset i = m + N/2. The dual frequency grid is
// xi = m/(N*hbar) over the same index range, so every xi lies in
// [-1/(2 hbar), 1/(2 hbar))^n and the box length N*hbar is the reciprocal of
// the frequency step.
// ---------------------------------------------------------------------------

inline constexpr int kMaxDim = 4;

struct LatticeSpec {
    int dim = 1;       // n >= 1
    double hbar = 1.0; // lattice spacing > 0
    int points = 2;    // N per axis, even, >= 2

    void validate() const;

    std::size_t site_count() const {
        std::size_t c = 1;
        for (int d = 0; d < dim; ++d) c *= static_cast<std::size_t>(points);
        return c;
    }
    double box_length() const { return points * hbar; }
    double freq_step() const { return 1.0 / box_length(); }
    double dual_cell_volume() const {
        double v = 1.0;
        for (int d = 0; d < dim; ++d) v *= freq_step();
        return v;
    }

    bool operator==(const LatticeSpec&) const = default;
};

// Row-major stride of an axis: points^(dim-1-axis).
std::size_t axis_stride(const LatticeSpec& spec, int axis);

// Signed index component m in [-N/2, N/2) of a flat index along an axis.
int signed_component(const LatticeSpec& spec, std::size_t flat, int axis);

// Flat index of a signed multi-index.
std::size_t flat_index(const LatticeSpec& spec, std::span<const int> m);

// |k| = hbar * sqrt(sum m_l^2) for the site at `flat`.
double site_radius(const LatticeSpec& spec, std::size_t flat);

// |xi|^2 = sum (m_l/(N hbar))^2 for the dual node at `flat`.
double freq_radius_sq(const LatticeSpec& spec, std::size_t flat);

// ---------------------------------------------------------------------------
// Complex-valued samples on the lattice sites (GridFunction) and on the dual
// frequency grid (SpectralFunction). Immutable after construction; the
// constructor enforces the size and rejects non-finite entries.
// ---------------------------------------------------------------------------

namespace detail {

template <class Tag>
class Field {
  public:
    // Zero field on the minimal lattice; placeholder for late-bound members.
    Field() : spec_{}, values_(spec_.site_count()) {}

    Field(LatticeSpec spec, std::vector<complex_t> values);

    static Field zeros(const LatticeSpec& spec) {
        return Field(spec, std::vector<complex_t>(spec.site_count()), unchecked{});
    }

    const LatticeSpec& spec() const { return spec_; }
    std::span<const complex_t> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    complex_t operator[](std::size_t flat) const { return values_[flat]; }
    complex_t at(std::span<const int> m) const { return values_[flat_index(spec_, m)]; }

    // Trusted construction for internal producers whose output is finite by
    // construction (transforms, solvers).
    struct unchecked {};
    Field(LatticeSpec spec, std::vector<complex_t> values, unchecked)
        : spec_(spec), values_(std::move(values)) {}

  private:
    LatticeSpec spec_;
    std::vector<complex_t> values_;
};

} // namespace detail

using GridFunction = detail::Field<struct GridTag>;
using SpectralFunction = detail::Field<struct SpectralTag>;

// ---------------------------------------------------------------------------
// Weighted norms and inner products.
//
//   ||f||_s    = ( sum_k (1+|k|)^{2s} |f(k)|^2 )^{1/2}
//   (u, v)_s   =   sum_k (1+|k|)^{2s} u(k) conj(v(k))
//
// Reductions use the fixed-block pairwise scheme, so values are reproducible
// for any thread count.
// ---------------------------------------------------------------------------

double weighted_norm(const GridFunction& f, double s);
complex_t weighted_inner_product(const GridFunction& u, const GridFunction& v, double s);

// Plain l2 norm of the elementwise difference of two fields.
double l2_distance(const GridFunction& u, const GridFunction& v);

// ---------------------------------------------------------------------------
// Field builders.
// ---------------------------------------------------------------------------

// f(k) = exp(2 pi i k . xi_mode) for a dual-grid mode (phase = m_k . mode / N).
GridFunction plane_wave(const LatticeSpec& spec, std::span<const int> mode);

// Unit mass at the origin site m = 0.
GridFunction point_mass(const LatticeSpec& spec);

GridFunction constant_grid(const LatticeSpec& spec, complex_t value);

// Re/Im uniform in [-1, 1].
GridFunction random_grid(const LatticeSpec& spec, Rng& rng);

// Spectral data: amplitude * exp(-|xi|^2/(2 sigma^2)) on |m|_inf <= band, else 0.
// Hermitian by construction, so the inverse transform is real.
SpectralFunction gaussian_band_spectrum(const LatticeSpec& spec, double sigma, int band,
                                        double amplitude = 1.0);

// Spectral indicator: `value` at the given mode, zero elsewhere.
SpectralFunction mode_spectrum(const LatticeSpec& spec, std::span<const int> mode,
                               complex_t value);

// Elementwise sum/difference/scaling (specs must match).
GridFunction add(const GridFunction& u, const GridFunction& v);
GridFunction subtract(const GridFunction& u, const GridFunction& v);
GridFunction scale(const GridFunction& u, complex_t c);

} // namespace latheat
