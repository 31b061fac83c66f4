#include "fastscat/translation.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace fastscat {

Eigen::Vector3i canonical_representative(const Eigen::Vector3i& v) {
    std::array<int, 3> a = {std::abs(v.x()), std::abs(v.y()), std::abs(v.z())};
    std::sort(a.begin(), a.end());
    return {a[0], a[1], a[2]};
}

SignedPerm symmetry_to_member(const Eigen::Vector3i& rep, const Eigen::Vector3i& member) {
    std::array<int, 3> order = {0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return std::abs(member[a]) < std::abs(member[b]);
    });
    SignedPerm sym;
    for (int i = 0; i < 3; ++i) {
        const int axis = order[i];
        if (std::abs(member[axis]) != rep[i])
            throw std::invalid_argument("symmetry_to_member: vectors are not equivalent");
        sym.perm[i] = axis;
        sym.sign[i] = member[axis] < 0 ? -1 : 1;
    }
    return sym;
}

FarInteractions classify_far_vectors(const BoxGrid& grid) {
    FarInteractions far;
    std::map<std::array<int, 3>, int> class_of;
    std::vector<std::map<std::array<int, 3>, int>> member_of;

    const int nb = grid.box_count();
    for (int j = 0; j < nb; ++j) {
        for (int i = 0; i < nb; ++i) {
            if (i == j) continue;
            const Eigen::Vector3i delta = grid.boxes[j].coords - grid.boxes[i].coords;
            if (!is_far_vector(delta)) continue;

            const Eigen::Vector3i rep = canonical_representative(delta);
            const std::array<int, 3> rep_key = {rep.x(), rep.y(), rep.z()};
            auto [cit, cnew] = class_of.try_emplace(rep_key, static_cast<int>(far.classes.size()));
            if (cnew) {
                far.classes.push_back({rep, {}});
                member_of.emplace_back();
            }
            const int cid = cit->second;

            const std::array<int, 3> mem_key = {delta.x(), delta.y(), delta.z()};
            auto [mit, mnew] =
                member_of[cid].try_emplace(mem_key, static_cast<int>(far.classes[cid].members.size()));
            if (mnew)
                far.classes[cid].members.push_back({delta, symmetry_to_member(rep, delta)});

            far.pairs.push_back({i, j, cid, mit->second});
        }
    }
    return far;
}

Eigen::MatrixXcd build_translation_matrix(const Eigen::Vector3i& vec,
                                          const UniformBoxModel& model, const Medium& medium) {
    if (!is_far_vector(vec))
        throw std::invalid_argument("build_translation_matrix: vector is not far-zone");
    const Vec3 w = model.box_edge * vec.cast<double>();
    const int nd = model.num_dipoles;
    Eigen::MatrixXcd g(3 * nd, 3 * nd);
    for (int k = 0; k < nd; ++k) {
        for (int l = 0; l < nd; ++l) {
            g.block<3, 3>(3 * l, 3 * k) =
                dyadic_green(w + model.dipole_offsets[l], model.dipole_offsets[k], medium);
        }
    }
    return g;
}

std::vector<int> dipole_permutation(const SignedPerm& sym, const UniformBoxModel& model) {
    const int n = model.n_d;
    std::vector<int> sigma(model.num_dipoles);
    for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) {
                const std::array<int, 3> src = {i, j, k};
                std::array<int, 3> dst = {0, 0, 0};
                for (int ax = 0; ax < 3; ++ax)
                    dst[sym.perm[ax]] = sym.sign[ax] > 0 ? src[ax] : n - 1 - src[ax];
                sigma[model.dipole_index(i, j, k)] =
                    model.dipole_index(dst[0], dst[1], dst[2]);
            }
        }
    }
    return sigma;
}

Eigen::MatrixXcd transform_to_member(const Eigen::MatrixXcd& g_rep, const SignedPerm& sym,
                                     const UniformBoxModel& model) {
    {
        std::array<int, 3> p = sym.perm;
        std::sort(p.begin(), p.end());
        if (p != std::array<int, 3>{0, 1, 2} ||
            std::abs(sym.sign[0]) != 1 || std::abs(sym.sign[1]) != 1 || std::abs(sym.sign[2]) != 1)
            throw std::invalid_argument("transform_to_member: not a cube symmetry element");
    }
    const std::vector<int> sigma = dipole_permutation(sym, model);
    const Eigen::Matrix3d q = sym.matrix();
    const int nd = model.num_dipoles;
    Eigen::MatrixXcd out(3 * nd, 3 * nd);
    for (int k = 0; k < nd; ++k)
        for (int l = 0; l < nd; ++l)
            out.block<3, 3>(3 * sigma[l], 3 * sigma[k]) =
                q * g_rep.block<3, 3>(3 * l, 3 * k) * q.transpose();
    return out;
}

void apply_symmetry(const SignedPerm& sym, const UniformBoxModel& model,
                    const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    const std::vector<int> sigma = dipole_permutation(sym, model);
    const Eigen::Matrix3d q = sym.matrix();
    out.resize(in.size());
    for (int d = 0; d < model.num_dipoles; ++d)
        out.segment<3>(3 * sigma[d]) = q * in.segment<3>(3 * d);
}

void apply_symmetry_transpose(const SignedPerm& sym, const UniformBoxModel& model,
                              const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    const std::vector<int> sigma = dipole_permutation(sym, model);
    const Eigen::Matrix3d qt = sym.matrix().transpose();
    out.resize(in.size());
    for (int d = 0; d < model.num_dipoles; ++d)
        out.segment<3>(3 * d) = qt * in.segment<3>(3 * sigma[d]);
}

std::vector<Eigen::VectorXcd> translate_dgfa(const DipoleCoefficients& coeffs,
                                             const FarInteractions& far,
                                             const UniformBoxModel& model, const Medium& medium,
                                             int num_boxes) {
    std::vector<Eigen::MatrixXcd> rep_matrices(far.classes.size());
    for (size_t c = 0; c < far.classes.size(); ++c)
        rep_matrices[c] = build_translation_matrix(far.classes[c].representative, model, medium);

    // Accumulation runs in ascending source order per target.
    std::vector<FarPair> pairs = far.pairs;
    std::sort(pairs.begin(), pairs.end(), [](const FarPair& a, const FarPair& b) {
        return std::tie(a.target_box, a.source_box) < std::tie(b.target_box, b.source_box);
    });

    std::vector<Eigen::VectorXcd> fields(num_boxes,
                                         Eigen::VectorXcd::Zero(3 * model.num_dipoles));
    Eigen::VectorXcd tmp, prod, contrib;
    for (const FarPair& p : pairs) {
        const auto& member = far.classes[p.class_id].members[p.member_id];
        apply_symmetry_transpose(member.sym, model, coeffs.per_box[p.source_box], tmp);
        prod.noalias() = rep_matrices[p.class_id] * tmp;
        apply_symmetry(member.sym, model, prod, contrib);
        fields[p.target_box] += contrib;
    }
    return fields;
}

} // namespace fastscat
