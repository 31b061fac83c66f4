#include "fastscat/cache.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fastscat {

namespace {

constexpr char kMagic[8] = {'F', 'S', 'C', 'A', 'C', 'H', '0', '1'};

std::uint64_t fnv1a(const void* data, size_t bytes, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

void write_matrix(std::ofstream& out, const Eigen::MatrixXcd& m) {
    const std::int64_t rows = m.rows(), cols = m.cols();
    out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
    out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(cd) * m.size()));
}

bool read_matrix(std::ifstream& in, Eigen::MatrixXcd& m) {
    std::int64_t rows, cols;
    in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
    in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
    if (!in || rows < 0 || cols < 0) return false;
    m.resize(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(cd) * m.size()));
    return static_cast<bool>(in);
}

} // namespace

std::string preprocess_cache_key(const TriangleMesh& mesh, double frequency_hz,
                                 double box_edge, int n_d, double svd_cutoff) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& v : mesh.vertices) h = fnv1a(v.data(), 3 * sizeof(double), h);
    for (const auto& t : mesh.triangles) h = fnv1a(t.data(), 3 * sizeof(int), h);
    h = fnv1a(&frequency_hz, sizeof(double), h);
    h = fnv1a(&box_edge, sizeof(double), h);
    h = fnv1a(&n_d, sizeof(int), h);
    h = fnv1a(&svd_cutoff, sizeof(double), h);
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

void save_preprocess_cache(const std::string& dir, const std::string& key,
                           const PreprocessCache& cache) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + key + ".bin";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cache: cannot open " + path);
    out.write(kMagic, sizeof(kMagic));

    const auto& m = cache.model;
    out.write(reinterpret_cast<const char*>(&m.box_edge), sizeof(double));
    const std::int32_t meta[4] = {m.n_d, m.num_dipoles, m.num_samples, m.effective_rank};
    out.write(reinterpret_cast<const char*>(meta), sizeof(meta));
    for (const auto& p : m.dipole_offsets)
        out.write(reinterpret_cast<const char*>(p.data()), 3 * sizeof(double));
    out.write(reinterpret_cast<const char*>(&m.sphere.radius), sizeof(double));
    for (const auto& p : m.sphere.points)
        out.write(reinterpret_cast<const char*>(p.data()), 3 * sizeof(double));
    write_matrix(out, m.a);
    write_matrix(out, m.pinv_a);
    write_matrix(out, m.pinv_a_t);
    write_matrix(out, cache.table.forward);
    write_matrix(out, cache.table.inverse);
}

std::optional<PreprocessCache> load_preprocess_cache(const std::string& dir,
                                                     const std::string& key) {
    const std::string path = dir + "/" + key + ".bin";
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::string(magic, 8) != std::string(kMagic, 8)) return std::nullopt;

    PreprocessCache cache;
    auto& m = cache.model;
    in.read(reinterpret_cast<char*>(&m.box_edge), sizeof(double));
    std::int32_t meta[4];
    in.read(reinterpret_cast<char*>(meta), sizeof(meta));
    if (!in || meta[0] < 1) return std::nullopt;
    m.n_d = meta[0];
    m.num_dipoles = meta[1];
    m.num_samples = meta[2];
    m.effective_rank = meta[3];
    m.dipole_offsets.resize(m.num_dipoles);
    for (auto& p : m.dipole_offsets)
        in.read(reinterpret_cast<char*>(p.data()), 3 * sizeof(double));
    in.read(reinterpret_cast<char*>(&m.sphere.radius), sizeof(double));
    m.sphere.points.resize(m.num_samples);
    for (auto& p : m.sphere.points)
        in.read(reinterpret_cast<char*>(p.data()), 3 * sizeof(double));
    if (!read_matrix(in, m.a) || !read_matrix(in, m.pinv_a) || !read_matrix(in, m.pinv_a_t))
        return std::nullopt;
    if (!read_matrix(in, cache.table.forward) || !read_matrix(in, cache.table.inverse))
        return std::nullopt;
    return cache;
}

} // namespace fastscat
