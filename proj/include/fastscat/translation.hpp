#pragma once

#include "fastscat/mapping.hpp"

namespace fastscat {

/// Element of the 48-member cube symmetry group: axis i of the source
/// maps to axis perm[i] of the image with the given sign. As a matrix,
/// column i has the single entry sign[i] at row perm[i].
struct SignedPerm {
    std::array<int, 3> perm = {0, 1, 2};
    std::array<int, 3> sign = {1, 1, 1};

    Eigen::Vector3i apply(const Eigen::Vector3i& v) const {
        Eigen::Vector3i out;
        for (int i = 0; i < 3; ++i) out[perm[i]] = sign[i] * v[i];
        return out;
    }
    Eigen::Matrix3d matrix() const {
        Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
        for (int i = 0; i < 3; ++i) q(perm[i], i) = sign[i];
        return q;
    }
    bool is_identity() const {
        return perm == std::array<int, 3>{0, 1, 2} && sign == std::array<int, 3>{1, 1, 1};
    }
};

/// Signed permutation mapping the canonical representative (sorted
/// absolute values, non-negative) onto `member`; deterministic.
SignedPerm symmetry_to_member(const Eigen::Vector3i& rep, const Eigen::Vector3i& member);

Eigen::Vector3i canonical_representative(const Eigen::Vector3i& v);

/// Far-zone test on the integer lattice: max |n_i| >= 2, equivalent to
/// ||w|| >= 2a for integer box offsets.
inline bool is_far_vector(const Eigen::Vector3i& n) {
    return n.cwiseAbs().maxCoeff() >= 2;
}

/// Orbit of a representative under the cube symmetries, restricted to
/// the vectors that actually occur between occupied boxes.
struct TranslationClass {
    Eigen::Vector3i representative;
    struct Member {
        Eigen::Vector3i vec;
        SignedPerm sym; // representative -> vec
    };
    std::vector<Member> members;
};

struct FarPair {
    int source_box = -1;
    int target_box = -1;
    int class_id = -1;
    int member_id = -1;
};

struct FarInteractions {
    std::vector<TranslationClass> classes;
    std::vector<FarPair> pairs; // sorted by (target_box, source_box)
};

/// Enumerates every ordered far box pair of the grid and groups the
/// occurring translation vectors into symmetry classes.
FarInteractions classify_far_vectors(const BoxGrid& grid);

/// Exact DGFA translation matrix for lattice offset `vec` (in units of
/// the box edge): block (l, k) is D(w + r_dl, r_dk), w = a * vec.
Eigen::MatrixXcd build_translation_matrix(const Eigen::Vector3i& vec,
                                          const UniformBoxModel& model, const Medium& medium);

/// Conjugates a representative matrix into a member frame:
/// G_member = T G_rep T^T with T the dipole-grid action of `sym`.
/// Requires the centered uniform grid (invariant under cube symmetries).
Eigen::MatrixXcd transform_to_member(const Eigen::MatrixXcd& g_rep, const SignedPerm& sym,
                                     const UniformBoxModel& model);

/// Grid index permutation induced by `sym`: dipole d maps to sigma[d].
std::vector<int> dipole_permutation(const SignedPerm& sym, const UniformBoxModel& model);

/// In-place stacked-vector action of T (out[3 sigma(d)+.] = Q in[3d+.])
/// and its transpose.
void apply_symmetry(const SignedPerm& sym, const UniformBoxModel& model,
                    const Eigen::VectorXcd& in, Eigen::VectorXcd& out);
void apply_symmetry_transpose(const SignedPerm& sym, const UniformBoxModel& model,
                              const Eigen::VectorXcd& in, Eigen::VectorXcd& out);

/// Serial reference translation: E_j = sum over far sources of G_w P_i,
/// accumulated in ascending source-box order. Representative matrices
/// are built on demand and cached per class.
std::vector<Eigen::VectorXcd> translate_dgfa(const DipoleCoefficients& coeffs,
                                             const FarInteractions& far,
                                             const UniformBoxModel& model, const Medium& medium,
                                             int num_boxes);

} // namespace fastscat
