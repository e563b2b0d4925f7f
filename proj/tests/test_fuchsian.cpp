#include <cmath>
#include <random>

#include "doctest.h"
#include "lozlab/fuchsian.hpp"

using namespace lozlab;

namespace {

OrbifoldSignature pants(int k = 1) {
    OrbifoldSignature s;
    s.genus = 0;
    s.boundaryCount = 3;
    s.coverDegree = k;
    return s;
}

}  // namespace

TEST_CASE("pants representation: certificate, fixed points, relations") {
    FuchsianResult fr = buildFuchsian(pants());
    CHECK(fr.certificate.valid);

    for (int i = 1; i <= 3; ++i) {
        GroupWord ci = GroupWord::one({GenKind::C, i});
        CHECK(std::abs(fr.rep.translationNumber(ci, 1000)) < 1e-3);
        auto fps = fr.rep.fixedPoints(ci);
        REQUIRE(fps.size() == 2);
        CHECK(fps[0].type != fps[1].type);
        for (const auto& f : fps) CHECK(f.type != FixedPointRecord::Type::Neutral);
    }

    // Relations hold up to their constant central charge.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (const Relation& r : fr.rep.presentation().relations) {
        double charge = fr.relationCharges.at(r.name);
        for (int s = 0; s < 100; ++s) {
            double x = unif(rng);
            double resid = fr.rep.evaluate(r.lhs, x) - fr.rep.evaluate(r.rhs, x) - charge;
            CHECK(std::abs(resid) < 1e-9);
        }
    }
}

TEST_CASE("k = 2 cover doubles the boundary fixed points into two tau orbits") {
    FuchsianResult fr = buildFuchsian(pants(2));
    for (int i = 1; i <= 3; ++i) {
        auto fps = fr.rep.fixedPoints(GroupWord::one({GenKind::C, i}));
        REQUIRE(fps.size() == 4);
        // Each fixed point's half-period translate is again a fixed point.
        for (const auto& f : fps) {
            double shifted = f.location + 0.5;
            if (shifted >= 1.0) shifted -= 1.0;
            bool foundMate = false;
            for (const auto& g : fps)
                if (std::abs(g.location - shifted) < 1e-9 && g.type == f.type) foundMate = true;
            CHECK(foundMate);
        }
    }
}

TEST_CASE("disk with cone points 2,3") {
    OrbifoldSignature sig;
    sig.coneOrders = {2, 3};
    sig.boundaryCount = 1;
    FuchsianResult fr = buildFuchsian(sig);
    CHECK(fr.certificate.valid);

    GenId d1{GenKind::D, 1}, d2{GenKind::D, 2};
    GroupWord d1sq({{d1, +1}, {d1, +1}});
    GroupWord d2cb({{d2, +1}, {d2, +1}, {d2, +1}});
    double c1 = fr.rep.evaluate(d1sq, 0.3) - 0.3;
    double c2 = fr.rep.evaluate(d2cb, 0.3) - 0.3;
    CHECK(std::abs(c1 - std::round(c1)) < 1e-9);
    CHECK(std::abs(c2 - std::round(c2)) < 1e-9);

    // Elliptic letters have no circle fixed points; the boundary word has 2.
    CHECK(fr.rep.fixedPoints(GroupWord::one(d1)).empty());
    auto fps = fr.rep.fixedPoints(GroupWord::one({GenKind::C, 1}));
    REQUIRE(fps.size() == 2);
    CHECK(fps[0].type != fps[1].type);
}

TEST_CASE("certificate soundness gives faithfulness on short normal forms") {
    FuchsianResult fr = buildFuchsian(pants());
    const Presentation& pres = fr.rep.presentation();
    std::mt19937_64 rng(23);
    auto fps = fr.rep.fixedPoints(GroupWord::one({GenKind::C, 1}));
    double x0 = 0.5 * (fps[0].location + fps[1].location);
    int tested = 0;
    while (tested < 200) {
        GroupWord w;
        int len = 1 + static_cast<int>(rng() % 8);
        for (int i = 0; i < len; ++i) {
            GenId g = pres.freeGenerators[rng() % pres.freeGenerators.size()];
            w.letters.push_back({g, (rng() % 2) ? +1 : -1});
        }
        GroupWord nf = freeNormalForm(w, pres);
        if (nf.empty()) continue;
        ++tested;
        CHECK(std::abs(fr.rep.evaluate(nf, x0) - x0) > 1e-9);
    }
}

TEST_CASE("twist is trivial for orientation-preserving groups") {
    FuchsianResult fr = buildFuchsian(pants());
    TwistedPair tp = twist(fr.rep);
    CHECK(tp.rho0.core() == tp.rho0star.core());
}

TEST_CASE("twist composes reversing letters with the 1/k translation") {
    OrbifoldSignature sig;
    sig.genus = 1;
    sig.orientable = false;
    sig.boundaryCount = 2;
    FuchsianResult fr = buildFuchsian(sig);
    TwistedPair tp = twist(fr.rep);

    GroupWord a1 = GroupWord::one({GenKind::A, 1});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int s = 0; s < 100; ++s) {
        double x = unif(rng);
        CHECK(tp.rho0star.evaluate(a1, x) ==
              doctest::Approx(tp.rho0.evaluate(a1, x) + 1.0).epsilon(1e-12));
    }

    // The twisted diagonal action preserves Omega0 = {x < y < x + 1/k}.
    const Presentation& pres = fr.rep.presentation();
    for (int trial = 0; trial < 1000; ++trial) {
        GroupWord w;
        int len = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < len; ++i) {
            GenId g = pres.freeGenerators[rng() % pres.freeGenerators.size()];
            w.letters.push_back({g, (rng() % 2) ? +1 : -1});
        }
        double x = unif(rng);
        double y = x + 0.2 + 0.3 * (unif(rng) + 1.0);
        REQUIRE(y - x < 1.0);
        double xi = tp.rho0.evaluate(w, x);
        double yi = tp.rho0star.evaluate(w, y);
        CHECK(xi < yi);
        CHECK(yi < xi + 1.0);
    }
}

TEST_CASE("rejections: colliding file geometry and torsion on covers") {
    GeometryParams geom;
    geom.useDefault = false;
    geom.matrices["c1"] = Mat2::axis(0.1, 0.6, 4.0, 1);
    geom.matrices["c2"] = Mat2::axis(0.1001, 0.6001, 4.0, 1);  // same axes: no ping-pong
    CHECK_THROWS_AS(buildFuchsian(pants(), geom), ConstructionError);

    OrbifoldSignature sig;
    sig.coneOrders = {2, 3};
    sig.boundaryCount = 1;
    sig.coverDegree = 2;
    CHECK_THROWS_AS(buildFuchsian(sig), ConstructionError);
}
