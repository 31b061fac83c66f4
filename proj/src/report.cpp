#include "fastscat/report.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fastscat {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path);
    out.precision(17);
    return out;
}

} // namespace

std::string file_header(const RunConfig& config) {
    return "# fastscat " + std::string(kVersion) + " config_hash=" + config.hash() + "\n";
}

void ensure_directory(const std::string& path) {
    if (!path.empty()) std::filesystem::create_directories(path);
}

void write_pattern_csv(const std::string& path, const RunConfig& config,
                       const FarFieldPattern& pattern) {
    auto out = open_out(path);
    out << file_header(config);
    out << "theta_deg,phi_deg,re_E,im_E,abs_E\n";
    for (size_t i = 0; i < pattern.angles_deg.size(); ++i) {
        const double phi = pattern.angles_deg[i] >= 0.0 ? 0.0 : 180.0;
        const cd v = pattern.values[i];
        out << std::abs(pattern.angles_deg[i]) << "," << phi << "," << v.real() << ","
            << v.imag() << "," << std::abs(v) << "\n";
    }
}

FarFieldPattern read_pattern_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    FarFieldPattern pattern;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("theta", 0) == 0) continue;
        std::istringstream ss(line);
        std::string tok;
        double vals[5];
        int i = 0;
        while (std::getline(ss, tok, ',') && i < 5) vals[i++] = std::stod(tok);
        if (i != 5) throw std::runtime_error("bad pattern row in " + path);
        const double angle = vals[1] >= 90.0 ? -vals[0] : vals[0];
        pattern.angles_deg.push_back(angle);
        pattern.values.emplace_back(vals[2], vals[3]);
    }
    return pattern;
}

void write_currents_csv(const std::string& path, const RunConfig& config,
                        const TriangleMesh& mesh, const RwgBasis& basis,
                        const Eigen::VectorXcd& coeffs) {
    auto out = open_out(path);
    out << file_header(config);
    out << "triangle,cx,cy,cz,j_mag\n";
    const int nt = static_cast<int>(mesh.triangles.size());
    std::vector<CVec3> current(nt, CVec3::Zero());
    for (int k = 0; k < basis.size(); ++k) {
        const auto& f = basis.functions[k];
        for (int tri : {f.tri_plus, f.tri_minus})
            current[tri] +=
                coeffs[k] * basis.value(mesh, k, tri, mesh.triangle_centroid(tri)).cast<cd>();
    }
    for (int t = 0; t < nt; ++t) {
        const Vec3 c = mesh.triangle_centroid(t);
        out << t << "," << c.x() << "," << c.y() << "," << c.z() << "," << current[t].norm()
            << "\n";
    }
}

void write_residual_csv(const std::string& path, const RunConfig& config,
                        const std::vector<double>& history) {
    auto out = open_out(path);
    out << file_header(config);
    out << "iteration,relative_residual\n";
    for (size_t i = 0; i < history.size(); ++i) out << (i + 1) << "," << history[i] << "\n";
}

void write_bench_csv(const std::string& path, const RunConfig& config,
                     const std::vector<BenchRow>& rows) {
    auto out = open_out(path);
    out << file_header(config);
    out << "workers,mean_mvm_seconds,speedup\n";
    for (const auto& r : rows)
        out << r.workers << "," << r.mean_mvm_seconds << "," << r.speedup << "\n";
}

void write_train_csv(const std::string& path, const RunConfig& config,
                     const std::vector<TrainReportRow>& rows) {
    auto out = open_out(path);
    out << file_header(config);
    out << "class,stage,epochs,final_loss,e_u_mean,e_sp_mean,e_sp_std\n";
    for (const auto& r : rows)
        out << r.class_name << "," << r.stage << "," << r.epochs << "," << r.final_loss << ","
            << r.e_u_mean << "," << r.e_sp_mean << "," << r.e_sp_std << "\n";
}

void write_solution_dump(const std::string& path, const Eigen::VectorXcd& coeffs) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    const char magic[8] = {'F', 'S', 'C', 'U', 'R', 'R', '0', '1'};
    out.write(magic, sizeof(magic));
    const std::uint64_t n = static_cast<std::uint64_t>(coeffs.size());
    out.write(reinterpret_cast<const char*>(&n), sizeof(n));
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
        const float re = static_cast<float>(coeffs[i].real());
        const float im = static_cast<float>(coeffs[i].imag());
        out.write(reinterpret_cast<const char*>(&re), sizeof(re));
        out.write(reinterpret_cast<const char*>(&im), sizeof(im));
    }
}

Eigen::VectorXcd read_solution_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (std::string(magic, 8) != "FSCURR01")
        throw std::runtime_error("bad magic in solution dump " + path);
    std::uint64_t n;
    in.read(reinterpret_cast<char*>(&n), sizeof(n));
    Eigen::VectorXcd coeffs(static_cast<Eigen::Index>(n));
    for (std::uint64_t i = 0; i < n; ++i) {
        float re, im;
        in.read(reinterpret_cast<char*>(&re), sizeof(re));
        in.read(reinterpret_cast<char*>(&im), sizeof(im));
        coeffs[static_cast<Eigen::Index>(i)] = cd(re, im);
    }
    if (!in) throw std::runtime_error("truncated solution dump " + path);
    return coeffs;
}

void write_text_report(const std::string& path, const RunConfig& config,
                       const std::string& body) {
    auto out = open_out(path);
    out << file_header(config);
    out << body;
}

} // namespace fastscat
