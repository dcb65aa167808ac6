#include "cch/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace cch {
namespace {

constexpr std::array<char, 8> kMagic = {'C', 'C', 'H', 'F', 'L', 'D', '\0', '\0'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <class T>
void put_le(std::string& buf, T value) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    buf.append(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(const std::string& buf, std::size_t& off) {
    if (off + sizeof(T) > buf.size()) throw std::runtime_error("snapshot file truncated");
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), buf.data() + off, sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    off += sizeof(T);
    return value;
}

} // namespace

void write_snapshot(const std::filesystem::path& path, const PhysicalField& field, double time) {
    field.domain.validate();
    if (field.values.size() != field.domain.grid_size())
        throw std::invalid_argument("snapshot field has wrong sample count");

    std::string buf;
    buf.reserve(32 + field.values.size() * sizeof(double));
    buf.append(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(buf, kVersion);
    put_le<std::uint32_t>(buf, 0); // reserved
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(field.domain.dimension));
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(field.domain.points_per_axis));
    put_le<double>(buf, time);
    for (double v : field.values) put_le<double>(buf, v);

    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path.string());
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!os) throw std::runtime_error("snapshot write failed: " + path.string());
}

Snapshot load_snapshot(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open snapshot: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());

    if (buf.size() < 32 || std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0)
        throw std::runtime_error("not a snapshot file: " + path.string());
    std::size_t off = kMagic.size();
    const auto version = get_le<std::uint32_t>(buf, off);
    if (version != kVersion)
        throw std::runtime_error("unsupported snapshot version " + std::to_string(version));
    (void)get_le<std::uint32_t>(buf, off); // reserved

    Snapshot snap;
    snap.field.domain.dimension = static_cast<int>(get_le<std::uint32_t>(buf, off));
    snap.field.domain.points_per_axis = static_cast<int>(get_le<std::uint32_t>(buf, off));
    snap.field.domain.validate();
    snap.time = get_le<double>(buf, off);

    const std::size_t count = snap.field.domain.grid_size();
    if (buf.size() != 32 + count * sizeof(double))
        throw std::runtime_error("snapshot value block has wrong size: " + path.string());
    snap.field.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) snap.field.values[i] = get_le<double>(buf, off);
    return snap;
}

void export_snapshot_text(const Snapshot& snap, const std::filesystem::path& out_path,
                          const std::string& format) {
    if (format != "csv" && format != "txt")
        throw std::invalid_argument("export format must be csv or txt");
    const char sep = format == "csv" ? ',' : ' ';
    std::ofstream os(out_path);
    if (!os) throw std::runtime_error("cannot open export target: " + out_path.string());

    char buf[64];
    const int p = snap.field.domain.points_per_axis;
    if (snap.field.domain.dimension == 1) {
        os << (format == "csv" ? "x,u\n" : "# x u\n");
        for (int j = 0; j < p; ++j) {
            const double x = snap.field.domain.grid_spacing() * j;
            std::snprintf(buf, sizeof(buf), "%.17g", x);
            os << buf << sep;
            std::snprintf(buf, sizeof(buf), "%.17g", snap.field.values[j]);
            os << buf << '\n';
        }
    } else {
        for (int jx = 0; jx < p; ++jx) {
            for (int jy = 0; jy < p; ++jy) {
                std::snprintf(buf, sizeof(buf), "%.17g",
                              snap.field.values[static_cast<std::size_t>(jx) * p + jy]);
                os << buf << (jy + 1 < p ? std::string(1, sep) : "\n");
            }
        }
    }
    if (!os) throw std::runtime_error("export write failed: " + out_path.string());
}

} // namespace cch
