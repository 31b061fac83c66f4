#pragma once

#include <optional>
#include <string>

#include "fastscat/mapping.hpp"

namespace fastscat {

/// Preprocessing products that are expensive to rebuild: the box model
/// (A and pseudo-inverses) and the per-basis mapping tables. Keyed by a
/// hash of the mesh bytes, frequency, box edge and dipole count; a cache
/// hit restores bit-identical arrays.
struct PreprocessCache {
    UniformBoxModel model;
    BasisMapTable table;
};

std::string preprocess_cache_key(const TriangleMesh& mesh, double frequency_hz,
                                 double box_edge, int n_d, double svd_cutoff);

void save_preprocess_cache(const std::string& dir, const std::string& key,
                           const PreprocessCache& cache);
std::optional<PreprocessCache> load_preprocess_cache(const std::string& dir,
                                                     const std::string& key);

} // namespace fastscat
