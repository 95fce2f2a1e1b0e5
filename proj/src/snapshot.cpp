#include "npe/snapshot.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "npe/errors.hpp"

namespace npe {

uint64_t crc64_xz(const void* data, size_t len) {
    static const auto table = [] {
        std::array<uint64_t, 256> t{};
        const uint64_t poly = 0xC96C5795D7870F42ull; // reflected 0x42F0E1EBA9EA3693
        for (uint32_t i = 0; i < 256; ++i) {
            uint64_t crc = i;
            for (int b = 0; b < 8; ++b) crc = (crc >> 1) ^ (crc & 1 ? poly : 0);
            t[i] = crc;
        }
        return t;
    }();
    uint64_t crc = ~0ull;
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) crc = (crc >> 8) ^ table[(crc ^ p[i]) & 0xff];
    return ~crc;
}

namespace {

constexpr char magic[4] = {'N', 'P', 'E', '2'};

void put_bytes(std::vector<unsigned char>& buf, const void* p, size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    buf.insert(buf.end(), b, b + len);
}

template <typename T>
void put_le(std::vector<unsigned char>& buf, T v) {
    static_assert(std::is_integral_v<T>);
    for (size_t i = 0; i < sizeof(T); ++i)
        buf.push_back(static_cast<unsigned char>((static_cast<uint64_t>(v) >> (8 * i)) & 0xff));
}

void put_f64(std::vector<unsigned char>& buf, double v) {
    put_le(buf, std::bit_cast<uint64_t>(v));
}

class Cursor {
public:
    Cursor(const unsigned char* p, size_t len) : p_(p), len_(len) {}

    void raw(void* out, size_t len) {
        if (pos_ + len > len_) throw SnapshotError(SnapshotError::Kind::Io, "snapshot truncated");
        std::memcpy(out, p_ + pos_, len);
        pos_ += len;
    }

    template <typename T>
    T le() {
        unsigned char b[sizeof(T)];
        raw(b, sizeof(T));
        uint64_t v = 0;
        for (size_t i = 0; i < sizeof(T); ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
        return static_cast<T>(v);
    }

    double f64() { return std::bit_cast<double>(le<uint64_t>()); }

private:
    const unsigned char* p_;
    size_t len_;
    size_t pos_ = 0;
};

uint8_t variant_tag(Variant v) {
    switch (v) {
    case Variant::NPE: return 0;
    case Variant::NPNS: return 1;
    case Variant::Regularized: return 2;
    }
    return 255;
}

Variant variant_from_tag(uint8_t t) {
    switch (t) {
    case 0: return Variant::NPE;
    case 1: return Variant::NPNS;
    case 2: return Variant::Regularized;
    }
    throw SnapshotError(SnapshotError::Kind::Io, "snapshot has unknown variant tag");
}

void put_field(std::vector<unsigned char>& buf, const SpectralField2D& f) {
    for (const auto& z : f.coeffs()) {
        put_f64(buf, z.real());
        put_f64(buf, z.imag());
    }
}

SpectralField2D read_field(Cursor& c, Grid g) {
    std::vector<std::complex<double>> coeffs(static_cast<size_t>(g.size()));
    for (auto& z : coeffs) {
        const double re = c.f64();
        const double im = c.f64();
        z = {re, im};
    }
    return SpectralField2D(g, std::move(coeffs));
}

} // namespace

void write_snapshot(const SimState& state, const PhysParams& params, const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);

    std::vector<unsigned char> buf;
    buf.reserve(24 + 48 * static_cast<size_t>(state.rho.size()));
    put_bytes(buf, magic, 4);
    put_le<uint16_t>(buf, snapshot_version);
    put_le<uint8_t>(buf, variant_tag(params.variant));
    put_le<uint8_t>(buf, 0);
    put_le<uint32_t>(buf, static_cast<uint32_t>(state.rho.grid().n));
    put_f64(buf, state.time);
    put_f64(buf, params.D);
    put_f64(buf, params.eps);
    put_f64(buf, params.kbtk);
    put_f64(buf, params.nu);
    put_f64(buf, params.ell);
    put_field(buf, state.rho);
    put_field(buf, state.sigma);
    put_field(buf, state.omega);
    put_le<uint64_t>(buf, crc64_xz(buf.data(), buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SnapshotError(SnapshotError::Kind::Io, "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw SnapshotError(SnapshotError::Kind::Io, "short write to " + path);
}

std::pair<SimState, PhysParams> read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SnapshotError(SnapshotError::Kind::Io, "cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

    if (buf.size() < 4 || std::memcmp(buf.data(), magic, 4) != 0)
        throw SnapshotError(SnapshotError::Kind::BadMagic, path + ": bad magic");
    if (buf.size() < 6)
        throw SnapshotError(SnapshotError::Kind::Io, path + ": truncated header");
    const uint16_t version = static_cast<uint16_t>(buf[4] | (buf[5] << 8));
    if (version != snapshot_version)
        throw SnapshotError(SnapshotError::Kind::VersionMismatch,
                            path + ": format version " + std::to_string(version) +
                                ", expected " + std::to_string(snapshot_version));
    if (buf.size() < 8 + 8)
        throw SnapshotError(SnapshotError::Kind::Io, path + ": truncated");

    const uint64_t stored_crc = [&] {
        uint64_t v = 0;
        for (size_t i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(buf[buf.size() - 8 + i]) << (8 * i);
        return v;
    }();
    if (crc64_xz(buf.data(), buf.size() - 8) != stored_crc)
        throw SnapshotError(SnapshotError::Kind::ChecksumMismatch, path + ": checksum mismatch");

    Cursor c(buf.data(), buf.size() - 8);
    char m[4];
    c.raw(m, 4);
    c.le<uint16_t>();
    const uint8_t vtag = c.le<uint8_t>();
    c.le<uint8_t>();
    const uint32_t n = c.le<uint32_t>();
    if (n < 8 || n % 2 != 0 || n > (1u << 16))
        throw SnapshotError(SnapshotError::Kind::Io, path + ": implausible grid size");

    SimState state;
    PhysParams params;
    params.variant = variant_from_tag(vtag);
    state.time = c.f64();
    params.D = c.f64();
    params.eps = c.f64();
    params.kbtk = c.f64();
    params.nu = c.f64();
    params.ell = c.f64();

    const Grid g(static_cast<int>(n));
    state.rho = read_field(c, g);
    state.sigma = read_field(c, g);
    state.omega = read_field(c, g);
    return {std::move(state), params};
}

} // namespace npe
