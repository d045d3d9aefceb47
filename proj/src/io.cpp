#include "latheat/io.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <unistd.h>

namespace latheat {

namespace fs = std::filesystem;

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | static_cast<std::uint32_t>(b[1]) << 8 |
           static_cast<std::uint32_t>(b[2]) << 16 | static_cast<std::uint32_t>(b[3]) << 24;
}

void put_f64(std::ostream& os, double v) {
    static_assert(sizeof(double) == 8);
    os.write(reinterpret_cast<const char*>(&v), 8);
}

double get_f64(std::istream& is) {
    double v;
    is.read(reinterpret_cast<char*>(&v), 8);
    return v;
}

fs::path temp_sibling(const fs::path& path) {
    static std::atomic<unsigned> counter{0};
    return path.parent_path() /
           (path.filename().string() + ".tmp-" + std::to_string(counter.fetch_add(1)) + "-" +
            std::to_string(static_cast<unsigned long>(::getpid())));
}

template <class Field>
void write_field(const Field& f, const fs::path& path, const char* magic) {
    const fs::path tmp = temp_sibling(path);
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("write_field: cannot open " + tmp.string());
        os.write(magic, 4);
        put_u32(os, kFieldFormatVersion);
        put_f64(os, static_cast<double>(f.spec().dim));
        put_f64(os, static_cast<double>(f.spec().points));
        put_f64(os, f.spec().hbar);
        for (const complex_t& z : f.values()) {
            put_f64(os, z.real());
            put_f64(os, z.imag());
        }
        if (!os) throw std::runtime_error("write_field: short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

template <class Field>
Field read_field(const fs::path& path, const char* magic) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_field: cannot open " + path.string());
    char got[4];
    is.read(got, 4);
    if (!is || std::memcmp(got, magic, 4) != 0)
        throw std::runtime_error("read_field: bad magic in " + path.string());
    const std::uint32_t version = get_u32(is);
    if (version != kFieldFormatVersion)
        throw std::runtime_error("read_field: unsupported version in " + path.string());
    LatticeSpec spec;
    spec.dim = static_cast<int>(get_f64(is));
    spec.points = static_cast<int>(get_f64(is));
    spec.hbar = get_f64(is);
    spec.validate();
    std::vector<complex_t> values(spec.site_count());
    for (complex_t& z : values) {
        const double re = get_f64(is);
        const double im = get_f64(is);
        z = complex_t(re, im);
    }
    if (!is) throw std::runtime_error("read_field: truncated file " + path.string());
    return Field(spec, std::move(values));
}

} // namespace

void write_grid(const GridFunction& f, const fs::path& path) { write_field(f, path, "LHGF"); }
GridFunction read_grid(const fs::path& path) { return read_field<GridFunction>(path, "LHGF"); }

void write_spectral(const SpectralFunction& f, const fs::path& path) {
    write_field(f, path, "LHSF");
}
SpectralFunction read_spectral(const fs::path& path) {
    return read_field<SpectralFunction>(path, "LHSF");
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field_csv(const GridFunction& f, const fs::path& path) {
    std::string out;
    const LatticeSpec& spec = f.spec();
    for (int d = 0; d < spec.dim; ++d) out += "m" + std::to_string(d + 1) + ",";
    out += "re,im\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        for (int d = 0; d < spec.dim; ++d)
            out += std::to_string(signed_component(spec, i, d)) + ",";
        out += format_double(f[i].real()) + "," + format_double(f[i].imag()) + "\n";
    }
    atomic_write_text(path, out);
}

void write_coefficient_csv(const SampledCoefficient& c, const fs::path& path) {
    std::string out = "t,value,derivative\n";
    for (int i = 0; i < c.grid.count; ++i) {
        out += format_double(c.grid.node(i)) + "," +
               format_double(c.values[static_cast<std::size_t>(i)]) + "," +
               format_double(c.derivative_values[static_cast<std::size_t>(i)]) + "\n";
    }
    atomic_write_text(path, out);
}

fs::path kernel_cache_dir() {
    if (const char* env = std::getenv("LATTICE_HEAT_CACHE"); env && *env) return fs::path(env);
    return fs::path(".lattice-heat-cache");
}

fs::path kernel_cache_path(double alpha, int dim, int radius, int quad_points,
                           TailPolicy policy) {
    // Key the file name on the exact bits of alpha.
    std::uint64_t bits;
    std::memcpy(&bits, &alpha, 8);
    char name[96];
    std::snprintf(name, sizeof name, "kc-%016llx-n%d-r%d-m%d-%s.bin",
                  static_cast<unsigned long long>(bits), dim, radius, quad_points,
                  policy == TailPolicy::fold_periodic ? "fold" : "trunc");
    return kernel_cache_dir() / name;
}

void write_kernel(const StencilKernel& k, const fs::path& path) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    const fs::path tmp = temp_sibling(path);
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("write_kernel: cannot open " + tmp.string());
        os.write("LHKC", 4);
        put_u32(os, kKernelFormatVersion);
        put_f64(os, k.alpha);
        put_u32(os, static_cast<std::uint32_t>(k.dim));
        put_u32(os, static_cast<std::uint32_t>(k.radius));
        put_u32(os, static_cast<std::uint32_t>(k.quad_points));
        for (double a : k.coeffs) put_f64(os, a);
        // trailer: tail policy and diagnostics
        put_u32(os, k.policy == TailPolicy::fold_periodic ? 0 : 1);
        put_f64(os, k.tail_mass);
        put_f64(os, k.tail_signed);
        put_f64(os, k.max_imag_residue);
        if (!os) throw std::runtime_error("write_kernel: short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

StencilKernel read_kernel(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_kernel: cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "LHKC", 4) != 0)
        throw std::runtime_error("read_kernel: bad magic in " + path.string());
    if (get_u32(is) != kKernelFormatVersion)
        throw std::runtime_error("read_kernel: unsupported version in " + path.string());
    StencilKernel k;
    k.alpha = get_f64(is);
    k.dim = static_cast<int>(get_u32(is));
    k.radius = static_cast<int>(get_u32(is));
    k.quad_points = static_cast<int>(get_u32(is));
    k.coeffs.resize(k.coeff_count());
    for (double& a : k.coeffs) a = get_f64(is);
    k.policy = get_u32(is) == 0 ? TailPolicy::fold_periodic : TailPolicy::truncate_report;
    k.tail_mass = get_f64(is);
    k.tail_signed = get_f64(is);
    k.max_imag_residue = get_f64(is);
    if (!is) throw std::runtime_error("read_kernel: truncated file " + path.string());
    return k;
}

StencilKernel cached_stencil_coefficients(double alpha, int dim, int radius, int quad_points,
                                          TailPolicy policy) {
    const fs::path path = kernel_cache_path(alpha, dim, radius, quad_points, policy);
    if (fs::exists(path)) {
        StencilKernel k = read_kernel(path);
        if (k.alpha == alpha && k.dim == dim && k.radius == radius &&
            k.quad_points == quad_points && k.policy == policy)
            return k;
    }
    StencilKernel k = stencil_coefficients(alpha, dim, radius, quad_points, policy);
    fs::create_directories(kernel_cache_dir());
    write_kernel(k, path);
    return k;
}

void write_kernel_csv(const StencilKernel& k, const fs::path& path) {
    std::string out;
    for (int d = 0; d < k.dim; ++d) out += "j" + std::to_string(d + 1) + ",";
    out += "a\n";
    std::vector<int> j(static_cast<std::size_t>(k.dim), -k.radius);
    for (std::size_t c = 0; c < k.coeffs.size(); ++c) {
        for (int d = 0; d < k.dim; ++d) out += std::to_string(j[static_cast<std::size_t>(d)]) + ",";
        out += format_double(k.coeffs[c]) + "\n";
        for (int d = k.dim - 1; d >= 0; --d) {
            if (++j[static_cast<std::size_t>(d)] <= k.radius) break;
            j[static_cast<std::size_t>(d)] = -k.radius;
        }
    }
    atomic_write_text(path, out);
}

void atomic_write_text(const fs::path& path, const std::string& content) {
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    const fs::path tmp = temp_sibling(path);
    {
        std::ofstream os(tmp, std::ios::binary);
        if (!os) throw std::runtime_error("atomic_write_text: cannot open " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw std::runtime_error("atomic_write_text: short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

} // namespace latheat
