#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "fastscat/translation.hpp"

using namespace fastscat;

namespace {
Medium desk_medium() { return Medium::free_space(1e9); }

// A grid whose occupied boxes are given explicitly (helpers for synthetic
// occupancy tests).
BoxGrid synthetic_grid(const std::vector<Eigen::Vector3i>& coords, double a, int level) {
    BoxGrid grid;
    grid.child_edge = a;
    grid.level = level;
    grid.boxes_per_axis = 1 << level;
    grid.origin = Vec3::Zero();
    std::vector<std::pair<int, Eigen::Vector3i>> sorted;
    for (const auto& c : coords) sorted.emplace_back(grid.linear_index(c), c);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [lin, c] : sorted) {
        BoxGrid::Box box;
        box.coords = c;
        grid.boxes.push_back(box);
    }
    return grid;
}

std::vector<Eigen::Vector3i> full_lattice(int width) {
    std::vector<Eigen::Vector3i> coords;
    for (int z = 0; z < width; ++z)
        for (int y = 0; y < width; ++y)
            for (int x = 0; x < width; ++x) coords.emplace_back(x, y, z);
    return coords;
}
} // namespace

TEST_CASE("far-zone rule on the lattice") {
    CHECK_FALSE(is_far_vector({1, 1, 1})); // sqrt(3) a < 2a
    CHECK(is_far_vector({0, 0, 2}));
    CHECK(is_far_vector({-2, 1, 0}));
    CHECK_FALSE(is_far_vector({0, 0, 0}));
    CHECK_FALSE(is_far_vector({1, 0, -1}));
}

TEST_CASE("full occupancy in [-3,3] gives 316 far vectors and 16 classes") {
    // 7^3 - 3^3 = 316 lattice offsets with max |n| >= 2; their sorted
    // absolute triples number 16.
    const BoxGrid grid = synthetic_grid(full_lattice(4), 1.0, 2);
    const FarInteractions far = classify_far_vectors(grid);

    std::set<std::array<int, 3>> distinct;
    for (const auto& cls : far.classes)
        for (const auto& m : cls.members) distinct.insert({m.vec.x(), m.vec.y(), m.vec.z()});
    CHECK(distinct.size() == 316);
    CHECK(far.classes.size() == 16);

    // Brute-force enumeration of sorted-abs triples with max >= 2.
    std::set<std::array<int, 3>> reps;
    for (int x = -3; x <= 3; ++x)
        for (int y = -3; y <= 3; ++y)
            for (int z = -3; z <= 3; ++z) {
                const Eigen::Vector3i v(x, y, z);
                if (!is_far_vector(v)) continue;
                const Eigen::Vector3i r = canonical_representative(v);
                reps.insert({r.x(), r.y(), r.z()});
            }
    CHECK(reps.size() == 16);
}

TEST_CASE("every occurring far pair is covered exactly once") {
    std::mt19937_64 rng(21);
    std::vector<Eigen::Vector3i> coords;
    std::set<std::array<int, 3>> used;
    std::uniform_int_distribution<int> d(0, 7);
    while (coords.size() < 40) {
        const Eigen::Vector3i c(d(rng), d(rng), d(rng));
        if (used.insert({c.x(), c.y(), c.z()}).second) coords.push_back(c);
    }
    const BoxGrid grid = synthetic_grid(coords, 0.5, 3);
    const FarInteractions far = classify_far_vectors(grid);

    // Brute-force pair enumeration.
    std::set<std::pair<int, int>> expected;
    for (int j = 0; j < grid.box_count(); ++j)
        for (int i = 0; i < grid.box_count(); ++i) {
            if (i == j) continue;
            if (is_far_vector(grid.boxes[j].coords - grid.boxes[i].coords))
                expected.insert({i, j});
        }
    std::set<std::pair<int, int>> seen;
    for (const auto& p : far.pairs) {
        CHECK(seen.insert({p.source_box, p.target_box}).second); // no duplicates
        const auto& member = far.classes[p.class_id].members[p.member_id];
        CHECK(member.vec == grid.boxes[p.target_box].coords - grid.boxes[p.source_box].coords);
        CHECK(member.sym.apply(far.classes[p.class_id].representative) == member.vec);
    }
    CHECK(seen == expected);
}

TEST_CASE("translation matrix columns are dipole fields") {
    const Medium med = desk_medium();
    const UniformBoxModel model = build_box_model(med.wavelength / 8.0, 2, med);
    const Eigen::Vector3i vec(0, 0, 2);
    const Eigen::MatrixXcd g = build_translation_matrix(vec, model, med);
    const Vec3 w = model.box_edge * vec.cast<double>();
    for (int l = 0; l < model.num_dipoles; ++l) {
        const CVec3 field = dipole_field(model.dipole_offsets[3], CVec3(1, 0, 0),
                                         w + model.dipole_offsets[l], med);
        CHECK((g.block<3, 1>(3 * l, 3 * 3 + 0) - field).norm() < 1e-15 * field.norm());
    }
    CHECK_THROWS(build_translation_matrix({1, 1, 0}, model, med));
}

TEST_CASE("norm decays with distance") {
    const Medium med = desk_medium();
    const UniformBoxModel model = build_box_model(med.wavelength / 8.0, 2, med);
    const double n2 = build_translation_matrix({0, 0, 2}, model, med).norm();
    const double n3 = build_translation_matrix({0, 0, 3}, model, med).norm();
    CHECK(n3 < n2);
}

TEST_CASE("G_{-w} relates to G_w by dipole-index reversal") {
    const Medium med = desk_medium();
    const UniformBoxModel model = build_box_model(med.wavelength / 8.0, 2, med);
    const Eigen::MatrixXcd gp = build_translation_matrix({1, -2, 2}, model, med);
    const Eigen::MatrixXcd gm = build_translation_matrix({-1, 2, -2}, model, med);
    // Reversal permutation: dipole at offset r maps to the one at -r.
    SignedPerm inv;
    inv.sign = {-1, -1, -1};
    const std::vector<int> sigma = dipole_permutation(inv, model);
    for (int k = 0; k < model.num_dipoles; ++k)
        for (int l = 0; l < model.num_dipoles; ++l) {
            const CMat3 a = gm.block<3, 3>(3 * l, 3 * k);
            const CMat3 b = gp.block<3, 3>(3 * sigma[l], 3 * sigma[k]);
            CHECK((a - b).norm() < 1e-13 * b.norm());
        }
}

TEST_CASE("transform_to_member equals direct assembly for all 16 classes") {
    const Medium med = desk_medium();
    const UniformBoxModel model = build_box_model(med.wavelength / 8.0, 2, med);
    const BoxGrid grid = synthetic_grid(full_lattice(4), med.wavelength / 8.0, 2);
    const FarInteractions far = classify_far_vectors(grid);
    REQUIRE(far.classes.size() == 16);

    std::mt19937_64 rng(5);
    for (const auto& cls : far.classes) {
        const Eigen::MatrixXcd g_rep = build_translation_matrix(cls.representative, model, med);
        // All members would be slow; check identity plus 3 random ones per class.
        std::uniform_int_distribution<size_t> pick(0, cls.members.size() - 1);
        for (int t = 0; t < 3; ++t) {
            const auto& member = cls.members[pick(rng)];
            const Eigen::MatrixXcd direct = build_translation_matrix(member.vec, model, med);
            const Eigen::MatrixXcd transformed = transform_to_member(g_rep, member.sym, model);
            CHECK((transformed - direct).norm() < 1e-12 * direct.norm());
        }
    }
}

TEST_CASE("identity and involution of transforms") {
    const Medium med = desk_medium();
    const UniformBoxModel model = build_box_model(med.wavelength / 8.0, 2, med);
    const Eigen::MatrixXcd g = build_translation_matrix({0, 2, 3}, model, med);

    SignedPerm id;
    CHECK((transform_to_member(g, id, model) - g).norm() == 0.0);

    SignedPerm mirror;
    mirror.sign = {1, -1, 1};
    const Eigen::MatrixXcd once = transform_to_member(g, mirror, model);
    const Eigen::MatrixXcd twice = transform_to_member(once, mirror, model);
    CHECK((twice - g).norm() < 1e-15 * g.norm());

    SignedPerm bogus;
    bogus.perm = {0, 0, 2};
    CHECK_THROWS(transform_to_member(g, bogus, model));
}

TEST_CASE("transform preserves singular values") {
    const Medium med = desk_medium();
    const UniformBoxModel model = build_box_model(med.wavelength / 8.0, 2, med);
    const Eigen::MatrixXcd g = build_translation_matrix({0, 0, 2}, model, med);
    SignedPerm sym;
    sym.perm = {2, 0, 1};
    sym.sign = {-1, 1, -1};
    const Eigen::MatrixXcd h = transform_to_member(g, sym, model);
    Eigen::JacobiSVD<Eigen::MatrixXcd> sg(g), sh(h);
    CHECK((sg.singularValues() - sh.singularValues()).norm() <
          1e-12 * sg.singularValues().norm());
}

TEST_CASE("translate_dgfa matches brute-force dipole summation") {
    const Medium med = desk_medium();
    const UniformBoxModel model = build_box_model(med.wavelength / 8.0, 2, med);
    std::vector<Eigen::Vector3i> coords = {{0, 0, 0}, {2, 0, 0}, {3, 1, 2}, {0, 3, 1},
                                           {1, 1, 1}, {3, 3, 3}};
    const BoxGrid grid = synthetic_grid(coords, med.wavelength / 8.0, 2);
    const FarInteractions far = classify_far_vectors(grid);

    std::mt19937_64 rng(8);
    std::normal_distribution<double> gauss;
    DipoleCoefficients coeffs;
    coeffs.per_box.resize(grid.box_count());
    for (auto& p : coeffs.per_box) {
        p.resize(3 * model.num_dipoles);
        for (int i = 0; i < p.size(); ++i) p[i] = cd(gauss(rng), gauss(rng));
    }

    const std::vector<Eigen::VectorXcd> fields =
        translate_dgfa(coeffs, far, model, med, grid.box_count());

    for (int j = 0; j < grid.box_count(); ++j) {
        Eigen::VectorXcd expect = Eigen::VectorXcd::Zero(3 * model.num_dipoles);
        for (int i = 0; i < grid.box_count(); ++i) {
            if (i == j || !is_far_vector(grid.boxes[j].coords - grid.boxes[i].coords)) continue;
            for (int l = 0; l < model.num_dipoles; ++l) {
                const Vec3 obs = grid.box_center(j) + model.dipole_offsets[l];
                for (int d = 0; d < model.num_dipoles; ++d) {
                    const Vec3 src = grid.box_center(i) + model.dipole_offsets[d];
                    expect.segment<3>(3 * l) +=
                        dyadic_green(obs, src, med) * coeffs.per_box[i].segment<3>(3 * d);
                }
            }
        }
        if (expect.norm() == 0.0)
            CHECK(fields[j].norm() == 0.0);
        else
            CHECK((fields[j] - expect).norm() / expect.norm() < 1e-12);
    }

    // Superposition.
    DipoleCoefficients doubled;
    doubled.per_box.resize(grid.box_count());
    for (int b = 0; b < grid.box_count(); ++b) doubled.per_box[b] = 2.0 * coeffs.per_box[b];
    const std::vector<Eigen::VectorXcd> f2 =
        translate_dgfa(doubled, far, model, med, grid.box_count());
    for (int j = 0; j < grid.box_count(); ++j)
        CHECK((f2[j] - 2.0 * fields[j]).norm() <= 1e-12 * std::max(1.0, fields[j].norm()));
}

TEST_CASE("class count formula for m in {2,3,4}") {
    for (int m : {2, 3, 4}) {
        std::set<std::array<int, 3>> reps;
        for (int x = -m; x <= m; ++x)
            for (int y = -m; y <= m; ++y)
                for (int z = -m; z <= m; ++z) {
                    const Eigen::Vector3i v(x, y, z);
                    if (!is_far_vector(v)) continue;
                    const Eigen::Vector3i r = canonical_representative(v);
                    reps.insert({r.x(), r.y(), r.z()});
                }
        // Count sorted triples 0 <= a <= b <= c <= m minus those with c <= 1.
        int count = 0;
        for (int aa = 0; aa <= m; ++aa)
            for (int bb = aa; bb <= m; ++bb)
                for (int cc = bb; cc <= m; ++cc)
                    if (cc >= 2) ++count;
        CHECK(static_cast<int>(reps.size()) == count);
        if (m == 3) CHECK(count == 16);
    }
}
