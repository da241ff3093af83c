#ifndef FAMREC_MATRIX_IO_HPP_
#define FAMREC_MATRIX_IO_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "famrec/error.hpp"
#include "famrec/simcore.hpp"

// Binary layout (little-endian):
//   magic "FRSM" | u32 version | u8 axis | u64 fingerprint | u64 n
//   n x (u32 length, key bytes) | n(n+1)/2 x f64 packed upper triangle

namespace famrec {

static_assert(std::endian::native == std::endian::little,
              "matrix dumps are written in host order and assume a little-endian host");

inline constexpr std::array<char, 4> kMatrixMagic = {'F', 'R', 'S', 'M'};
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

namespace detail {

template <class T>
void put(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw DataError("truncated matrix dump");
    return v;
}

} // namespace detail

/// `fingerprint` identifies the inputs the matrix was built from so a cache
/// reader can reject stale dumps.
inline void save_matrix(const SimilarityMatrix& w, const std::filesystem::path& path,
                        std::uint64_t fingerprint = 0) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write matrix dump " + path.string());
    out.write(kMatrixMagic.data(), kMatrixMagic.size());
    detail::put<std::uint32_t>(out, kMatrixFormatVersion);
    detail::put<std::uint8_t>(out, static_cast<std::uint8_t>(w.axis()));
    detail::put<std::uint64_t>(out, fingerprint);
    detail::put<std::uint64_t>(out, w.size());
    for (const auto& k : w.keys().keys()) {
        detail::put<std::uint32_t>(out, static_cast<std::uint32_t>(k.size()));
        out.write(k.data(), static_cast<std::streamsize>(k.size()));
    }
    const auto packed = w.packed();
    out.write(reinterpret_cast<const char*>(packed.data()),
              static_cast<std::streamsize>(packed.size() * sizeof(double)));
    if (!out)
        throw DataError("failed writing matrix dump " + path.string());
}

struct LoadedMatrix {
    SimilarityMatrix matrix;
    std::uint64_t fingerprint = 0;
};

inline LoadedMatrix load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open matrix dump " + path.string());
    std::array<char, 4> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kMatrixMagic)
        throw DataError(path.string() + " is not a matrix dump");
    if (detail::get<std::uint32_t>(in) != kMatrixFormatVersion)
        throw DataError(path.string() + " has an unsupported format version");
    const auto axis = detail::get<std::uint8_t>(in);
    if (axis > static_cast<std::uint8_t>(Axis::hybrid))
        throw DataError(path.string() + " has an invalid axis tag");
    LoadedMatrix out;
    out.fingerprint = detail::get<std::uint64_t>(in);
    const auto n = detail::get<std::uint64_t>(in);
    std::vector<std::string> keys;
    keys.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto len = detail::get<std::uint32_t>(in);
        std::string k(len, '\0');
        if (!in.read(k.data(), len))
            throw DataError("truncated matrix dump");
        keys.push_back(std::move(k));
    }
    out.matrix = SimilarityMatrix(static_cast<Axis>(axis), std::move(keys));
    auto packed = out.matrix.packed();
    if (!in.read(reinterpret_cast<char*>(packed.data()),
                 static_cast<std::streamsize>(packed.size() * sizeof(double))))
        throw DataError("truncated matrix dump");
    if (in.peek() != std::char_traits<char>::eof())
        throw DataError(path.string() + " has trailing bytes");
    return out;
}

/// FNV-1a over a byte range; chain calls by passing the previous hash.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 1469598103934665603ull) {
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    return hash;
}

} // namespace famrec

#endif // FAMREC_MATRIX_IO_HPP_
