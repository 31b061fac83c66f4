#pragma once

#include <string>
#include <vector>

#include "fastscat/config.hpp"
#include "fastscat/mie.hpp"

namespace fastscat {

inline constexpr const char* kVersion = "0.1.0";

/// All output files start with this comment header (config hash + code
/// version) so runs can be matched to their configuration.
std::string file_header(const RunConfig& config);

void write_pattern_csv(const std::string& path, const RunConfig& config,
                       const FarFieldPattern& pattern);
FarFieldPattern read_pattern_csv(const std::string& path);

void write_currents_csv(const std::string& path, const RunConfig& config,
                        const TriangleMesh& mesh, const RwgBasis& basis,
                        const Eigen::VectorXcd& coeffs);

void write_residual_csv(const std::string& path, const RunConfig& config,
                        const std::vector<double>& history);

struct BenchRow {
    int workers = 0;
    double mean_mvm_seconds = 0.0;
    double speedup = 0.0;
};
void write_bench_csv(const std::string& path, const RunConfig& config,
                     const std::vector<BenchRow>& rows);

struct TrainReportRow {
    std::string class_name;
    int stage = 0;
    int epochs = 0;
    double final_loss = 0.0;
    double e_u_mean = 0.0;
    double e_sp_mean = 0.0;
    double e_sp_std = 0.0;
};
void write_train_csv(const std::string& path, const RunConfig& config,
                     const std::vector<TrainReportRow>& rows);

/// Solution vector dump: magic, version, count, then little-endian
/// complex64 (float32 re, im) pairs.
void write_solution_dump(const std::string& path, const Eigen::VectorXcd& coeffs);
Eigen::VectorXcd read_solution_dump(const std::string& path);

void write_text_report(const std::string& path, const RunConfig& config,
                       const std::string& body);

void ensure_directory(const std::string& path);

} // namespace fastscat
