#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lozlab {

// Generator kinds for orbifold groups with boundary.
// Alphabet: a_i, b_i (orientable handles), d_j (cone points), c_i (boundary),
// plus the reserved central letter h (regular fiber, acts as x -> x+1).
enum class GenKind : uint8_t { A, B, D, C, H };

struct GenId {
    GenKind kind;
    int index;  // 1-based within its kind

    friend bool operator==(const GenId&, const GenId&) = default;
    friend auto operator<=>(const GenId&, const GenId&) = default;
};

std::string genName(GenId g);

struct Letter {
    GenId gen;
    int exp;  // +1 or -1

    Letter inverse() const { return {gen, -exp}; }
    friend bool operator==(const Letter&, const Letter&) = default;
};

// A word in the generators, stored in reading order: w = s_n ... s_1 is
// stored as [s_n, ..., s_1] and acts on the line by applying s_1 first.
struct GroupWord {
    std::vector<Letter> letters;

    GroupWord() = default;
    explicit GroupWord(std::vector<Letter> ls) : letters(std::move(ls)) {}

    static GroupWord one(GenId g, int exp = 1) { return GroupWord({{g, exp}}); }

    bool empty() const { return letters.empty(); }
    size_t size() const { return letters.size(); }
    GroupWord inverse() const;
    GroupWord concat(const GroupWord& rhs) const;  // this * rhs
    std::string str() const;

    friend bool operator==(const GroupWord&, const GroupWord&) = default;
    friend bool operator<(const GroupWord& a, const GroupWord& b);
};

struct OrbifoldSignature {
    int genus = 0;
    bool orientable = true;
    std::vector<int> coneOrders;  // alpha_j >= 2
    int boundaryCount = 1;        // q >= 1
    int coverDegree = 1;          // k >= 1

    int p() const { return static_cast<int>(coneOrders.size()); }
    // 2 - 2g - q - sum(1 - 1/alpha) orientable, 2 - g - q - sum(...) otherwise.
    double orbifoldEuler() const;
    // Throws std::invalid_argument when the signature is elementary or malformed.
    void validate() const;
};

struct Relation {
    GroupWord lhs;  // e.g. d_j^{alpha_j}
    GroupWord rhs;  // identity for torsion; long relation keeps both sides
    std::string name;
};

// Presentation of the base orbifold group.  Exactly one boundary letter (c_q)
// is derived: it is recoverable from the long relation, so the remaining
// letters generate a free product with only the torsion relations.
struct Presentation {
    OrbifoldSignature signature;
    std::vector<GenId> generators;      // full alphabet incl. derived boundary
    std::vector<GenId> freeGenerators;  // alphabet minus the derived letter
    std::vector<Relation> relations;    // d_j^alpha = 1 and the long relation
    GenId derivedBoundary{GenKind::C, 1};

    int q() const { return signature.boundaryCount; }
    int p() const { return signature.p(); }
    int coneOrder(int j) const { return signature.coneOrders.at(j - 1); }
    bool isTorsion(GenId g) const { return g.kind == GenKind::D; }
    bool isDerived(GenId g) const { return g == derivedBoundary; }
    bool inAlphabet(GenId g) const;
    // Orientation character: -1 for a_i in the non-orientable case, else +1.
    int orientation(GenId g) const;
    int orientation(const GroupWord& w) const;

    // Right-hand side of the long relation: [a1,b1]...[ag,bg] d1...dp or
    // a1^2...ag^2 d1...dp.
    GroupWord longRelationRhs() const;

    std::string toJson() const;
};

Presentation buildPresentation(const OrbifoldSignature& sig);

// Free-product normal form: cancels inverse pairs, substitutes the derived
// boundary letter, and reduces runs of a torsion letter d_j to a total
// exponent in [1, alpha_j - 1].
GroupWord freeNormalForm(const GroupWord& w, const Presentation& pres);

// The word w0 = s_l ... s_1 expressing c_i in the free generating set.
GroupWord boundaryWord(const Presentation& pres, int i);

}  // namespace lozlab
