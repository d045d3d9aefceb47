#pragma once

#include <filesystem>
#include <string>

#include "latheat/coefficients.hpp"
#include "latheat/fraclap.hpp"
#include "latheat/lattice.hpp"

namespace latheat {

// ---------------------------------------------------------------------------
// Flat binary field format, little-endian:
//   magic (4 bytes: "LHGF" grid / "LHSF" spectral), version (u32),
//   n, N, hbar (IEEE-754 doubles), then re/im doubles in index order.
// Index order is row-major with axis range [-N/2, N/2) (axis offset m + N/2),
// which makes the files portable across builds.
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kFieldFormatVersion = 1;

void write_grid(const GridFunction& f, const std::filesystem::path& path);
GridFunction read_grid(const std::filesystem::path& path);

void write_spectral(const SpectralFunction& f, const std::filesystem::path& path);
SpectralFunction read_spectral(const std::filesystem::path& path);

// CSV export (m_1..m_n, re, im), 17 significant digits.
void write_field_csv(const GridFunction& f, const std::filesystem::path& path);

// Sampled coefficient as CSV (t, value, derivative).
void write_coefficient_csv(const SampledCoefficient& c, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Kernel cache: magic "LHKC", version (u32), alpha (double), n, R, M (u32),
// then coefficients in index order (doubles), then a trailer with the tail
// policy (u32) and diagnostics (3 doubles). Writes are atomic (temp file
// then rename).
// ---------------------------------------------------------------------------

inline constexpr std::uint32_t kKernelFormatVersion = 1;

std::filesystem::path kernel_cache_dir();       // $LATTICE_HEAT_CACHE or ./.lattice-heat-cache
std::filesystem::path kernel_cache_path(double alpha, int dim, int radius, int quad_points,
                                        TailPolicy policy);

void write_kernel(const StencilKernel& k, const std::filesystem::path& path);
StencilKernel read_kernel(const std::filesystem::path& path);

// Cache-backed generation: read when present, else compute and store.
StencilKernel cached_stencil_coefficients(double alpha, int dim, int radius, int quad_points,
                                          TailPolicy policy = TailPolicy::fold_periodic);

// Kernel CSV: columns j_1..j_n, a_j.
void write_kernel_csv(const StencilKernel& k, const std::filesystem::path& path);

// Render a double with 17 significant digits (repeatable regression diffs).
std::string format_double(double v);

// Write a whole file atomically: temp file in the same directory, then rename.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

} // namespace latheat
