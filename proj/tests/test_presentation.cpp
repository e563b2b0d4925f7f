#include <functional>
#include <random>

#include "doctest.h"
#include "lozlab/presentation.hpp"

using namespace lozlab;

namespace {

OrbifoldSignature pantsSig() {
    OrbifoldSignature s;
    s.genus = 0;
    s.boundaryCount = 3;
    return s;
}

OrbifoldSignature torusBdrySig() {
    OrbifoldSignature s;
    s.genus = 1;
    s.boundaryCount = 1;
    return s;
}

OrbifoldSignature diskConesSig() {
    OrbifoldSignature s;
    s.genus = 0;
    s.coneOrders = {2, 3};
    s.boundaryCount = 1;
    return s;
}

// Independent reduction oracle: repeated full passes to a fixpoint, removing
// cancelling pairs and reducing torsion runs, never using the stack algorithm.
GroupWord rewriteOracle(GroupWord w, const Presentation& pres) {
    // Expand derived boundary letters first.
    bool expanded = true;
    while (expanded) {
        expanded = false;
        std::vector<Letter> out;
        for (Letter l : w.letters) {
            if (l.gen.kind == GenKind::C && pres.isDerived(l.gen)) {
                GroupWord sub = boundaryWord(pres, l.gen.index);
                if (l.exp < 0) sub = sub.inverse();
                out.insert(out.end(), sub.letters.begin(), sub.letters.end());
                expanded = true;
            } else {
                out.push_back(l);
            }
        }
        w.letters = out;
    }
    // Normalize torsion exponents to +1 letters.
    {
        std::vector<Letter> out;
        for (Letter l : w.letters) {
            if (l.gen.kind == GenKind::D && l.exp < 0) {
                int alpha = pres.coneOrder(l.gen.index);
                for (int m = 0; m < alpha - 1; ++m) out.push_back({l.gen, +1});
            } else {
                out.push_back(l);
            }
        }
        w.letters = out;
    }
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i + 1 < w.letters.size(); ++i) {
            if (w.letters[i].gen == w.letters[i + 1].gen &&
                w.letters[i].exp == -w.letters[i + 1].exp) {
                w.letters.erase(w.letters.begin() + i, w.letters.begin() + i + 2);
                changed = true;
                break;
            }
        }
        if (changed) continue;
        for (size_t i = 0; i < w.letters.size(); ++i) {
            if (w.letters[i].gen.kind != GenKind::D) continue;
            int alpha = pres.coneOrder(w.letters[i].gen.index);
            size_t j = i;
            while (j < w.letters.size() && w.letters[j].gen == w.letters[i].gen) ++j;
            if (j - i >= static_cast<size_t>(alpha)) {
                w.letters.erase(w.letters.begin() + i, w.letters.begin() + i + alpha);
                changed = true;
                break;
            }
        }
    }
    return w;
}

GroupWord randomWord(const Presentation& pres, std::mt19937_64& rng, int len) {
    std::uniform_int_distribution<size_t> pick(0, pres.generators.size() - 1);
    std::uniform_int_distribution<int> coin(0, 1);
    GroupWord w;
    for (int i = 0; i < len; ++i)
        w.letters.push_back({pres.generators[pick(rng)], coin(rng) ? +1 : -1});
    return w;
}

}  // namespace

TEST_CASE("buildPresentation on the three reference signatures") {
    Presentation torus = buildPresentation(torusBdrySig());
    CHECK(torus.freeGenerators.size() == 2);  // a1, b1
    CHECK(torus.relations.size() == 1);
    CHECK(torus.relations.back().rhs.str() == "a1.b1.a1^-1.b1^-1");

    Presentation pants = buildPresentation(pantsSig());
    CHECK(pants.freeGenerators.size() == 2);  // c1, c2
    CHECK(pants.derivedBoundary == GenId{GenKind::C, 3});

    Presentation disk = buildPresentation(diskConesSig());
    CHECK(disk.freeGenerators.size() == 2);  // d1, d2
    CHECK(disk.relations.size() == 3);
    CHECK(disk.relations[0].lhs.size() == 2);  // d1^2
    CHECK(disk.relations[1].lhs.size() == 3);  // d2^3
}

TEST_CASE("non-negative curvature signatures are rejected") {
    OrbifoldSignature annulus;
    annulus.genus = 0;
    annulus.boundaryCount = 2;
    CHECK_THROWS(buildPresentation(annulus));

    OrbifoldSignature diskOneCone;
    diskOneCone.coneOrders = {2};
    diskOneCone.boundaryCount = 1;
    CHECK_THROWS(buildPresentation(diskOneCone));

    OrbifoldSignature noBoundary;
    noBoundary.genus = 2;
    noBoundary.boundaryCount = 0;
    CHECK_THROWS(buildPresentation(noBoundary));
}

TEST_CASE("freeNormalForm reference examples") {
    Presentation torus = buildPresentation(torusBdrySig());
    GenId a{GenKind::A, 1}, b{GenKind::B, 1};

    GroupWord cancel({{a, +1}, {a, -1}});
    CHECK(freeNormalForm(cancel, torus).empty());

    Presentation disk = buildPresentation(diskConesSig());
    GroupWord d1a({{GenId{GenKind::D, 1}, +1}, {GenId{GenKind::D, 1}, +1}});
    CHECK(freeNormalForm(d1a, disk).empty());

    // [a1,b1] * b1 reduces to a1 b1 a1^-1.
    GroupWord comm({{a, +1}, {b, +1}, {a, -1}, {b, -1}, {b, +1}});
    GroupWord nf = freeNormalForm(comm, torus);
    CHECK(nf == rewriteOracle(comm, torus));
    CHECK(nf.str() == "a1.b1.a1^-1");
}

TEST_CASE("freeNormalForm matches the rewrite oracle on random words") {
    std::mt19937_64 rng(20240901);
    for (const auto& sig : {pantsSig(), torusBdrySig(), diskConesSig()}) {
        Presentation pres = buildPresentation(sig);
        for (int trial = 0; trial < 300; ++trial) {
            GroupWord w = randomWord(pres, rng, 1 + static_cast<int>(rng() % 12));
            CHECK(freeNormalForm(w, pres) == rewriteOracle(w, pres));
        }
    }
}

TEST_CASE("freeNormalForm is idempotent and compatible with concatenation") {
    std::mt19937_64 rng(7);
    Presentation pres = buildPresentation(diskConesSig());
    for (int trial = 0; trial < 200; ++trial) {
        GroupWord u = randomWord(pres, rng, 1 + static_cast<int>(rng() % 8));
        GroupWord v = randomWord(pres, rng, 1 + static_cast<int>(rng() % 8));
        GroupWord nu = freeNormalForm(u, pres);
        CHECK(freeNormalForm(nu, pres) == nu);
        CHECK(freeNormalForm(u.concat(v), pres) ==
              freeNormalForm(freeNormalForm(u, pres).concat(freeNormalForm(v, pres)), pres));
    }
}

TEST_CASE("boundaryWord reference examples") {
    Presentation torus = buildPresentation(torusBdrySig());
    GroupWord w0 = boundaryWord(torus, 1);
    CHECK(w0.str() == "a1.b1.a1^-1.b1^-1");
    CHECK(w0.size() == 4);

    Presentation disk = buildPresentation(diskConesSig());
    CHECK(boundaryWord(disk, 1).str() == "d1.d2");

    Presentation pants = buildPresentation(pantsSig());
    CHECK(boundaryWord(pants, 3).str() == "c2^-1.c1^-1");
    CHECK_THROWS(boundaryWord(pants, 4));
}

TEST_CASE("boundary letters solve the long relation") {
    for (const auto& sig : {pantsSig(), torusBdrySig(), diskConesSig()}) {
        Presentation pres = buildPresentation(sig);
        GroupWord product;
        for (int i = 1; i <= pres.q(); ++i)
            product = product.concat(boundaryWord(pres, i));
        GroupWord check = product.concat(pres.longRelationRhs().inverse());
        CHECK(freeNormalForm(check, pres).empty());
    }
}

namespace {

// Exhaustively enumerate reduced words up to maxLen over the free generating
// set and record the minimal length representing c1^r.
int minimalLengthOfBoundaryPower(const Presentation& pres, int r, int maxLen) {
    GroupWord target;
    for (int m = 0; m < r; ++m) target = target.concat(boundaryWord(pres, 1));
    target = freeNormalForm(target, pres);

    std::vector<Letter> alphabet;
    for (GenId g : pres.freeGenerators) {
        alphabet.push_back({g, +1});
        if (g.kind != GenKind::D || pres.coneOrder(g.index) > 2) alphabet.push_back({g, -1});
    }
    int best = -1;
    std::vector<Letter> cur;
    std::function<void(int)> rec = [&](int depth) {
        if (best >= 0) return;  // lengths explored in increasing depth order
        if (depth == 0) {
            GroupWord w{cur};
            if (freeNormalForm(w, pres) == target) best = static_cast<int>(cur.size());
            return;
        }
        for (const Letter& l : alphabet) {
            if (!cur.empty() && cur.back().gen == l.gen && cur.back().exp == -l.exp) continue;
            cur.push_back(l);
            rec(depth - 1);
            cur.pop_back();
        }
    };
    for (int len = 0; len <= maxLen && best < 0; ++len) rec(len);
    return best;
}

}  // namespace

TEST_CASE("boundary word length is minimal and powers need r*l letters") {
    Presentation disk = buildPresentation(diskConesSig());
    int l = static_cast<int>(boundaryWord(disk, 1).size());
    CHECK(l == 2);
    for (int r = 1; r <= 3; ++r)
        CHECK(minimalLengthOfBoundaryPower(disk, r, 3 * l) == r * l);

    Presentation torus = buildPresentation(torusBdrySig());
    int lt = static_cast<int>(boundaryWord(torus, 1).size());
    CHECK(lt == 4);
    for (int r = 1; r <= 2; ++r)
        CHECK(minimalLengthOfBoundaryPower(torus, r, 2 * lt) == r * lt);
}

TEST_CASE("non-orientable presentations use a_i as reversing letters") {
    OrbifoldSignature s;
    s.genus = 1;
    s.orientable = false;
    s.boundaryCount = 2;
    Presentation pres = buildPresentation(s);
    CHECK(pres.orientation(GenId{GenKind::A, 1}) == -1);
    CHECK(pres.orientation(GenId{GenKind::C, 1}) == +1);
    CHECK(pres.longRelationRhs().str() == "a1.a1");
    GroupWord sq({{GenId{GenKind::A, 1}, +1}, {GenId{GenKind::A, 1}, +1}});
    CHECK(pres.orientation(sq) == +1);
}
