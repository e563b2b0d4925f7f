#include "lozlab/presentation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lozlab {

std::string genName(GenId g) {
    std::ostringstream os;
    switch (g.kind) {
        case GenKind::A: os << 'a'; break;
        case GenKind::B: os << 'b'; break;
        case GenKind::D: os << 'd'; break;
        case GenKind::C: os << 'c'; break;
        case GenKind::H: return "h";
    }
    os << g.index;
    return os.str();
}

GroupWord GroupWord::inverse() const {
    GroupWord out;
    out.letters.reserve(letters.size());
    for (auto it = letters.rbegin(); it != letters.rend(); ++it)
        out.letters.push_back(it->inverse());
    return out;
}

GroupWord GroupWord::concat(const GroupWord& rhs) const {
    GroupWord out = *this;
    out.letters.insert(out.letters.end(), rhs.letters.begin(), rhs.letters.end());
    return out;
}

std::string GroupWord::str() const {
    if (letters.empty()) return "1";
    std::ostringstream os;
    for (size_t i = 0; i < letters.size(); ++i) {
        if (i) os << '.';
        os << genName(letters[i].gen);
        if (letters[i].exp < 0) os << "^-1";
    }
    return os.str();
}

bool operator<(const GroupWord& a, const GroupWord& b) {
    if (a.letters.size() != b.letters.size())
        return a.letters.size() < b.letters.size();
    for (size_t i = 0; i < a.letters.size(); ++i) {
        const Letter &x = a.letters[i], &y = b.letters[i];
        if (x.gen != y.gen) return x.gen < y.gen;
        if (x.exp != y.exp) return x.exp < y.exp;
    }
    return false;
}

double OrbifoldSignature::orbifoldEuler() const {
    double coneSum = 0.0;
    for (int a : coneOrders) coneSum += 1.0 - 1.0 / a;
    double base = orientable ? 2.0 - 2.0 * genus : 2.0 - genus;
    return base - boundaryCount - coneSum;
}

void OrbifoldSignature::validate() const {
    if (genus < 0) throw std::invalid_argument("signature: genus must be >= 0");
    if (boundaryCount < 1)
        throw std::invalid_argument("signature: needs at least one boundary component (q >= 1)");
    if (coverDegree < 1) throw std::invalid_argument("signature: cover degree k must be >= 1");
    if (!orientable && genus < 1)
        throw std::invalid_argument("signature: non-orientable surfaces need genus >= 1");
    for (int a : coneOrders)
        if (a < 2) throw std::invalid_argument("signature: cone orders must be >= 2");
    if (orbifoldEuler() >= 0)
        throw std::invalid_argument(
            "signature: orbifold Euler characteristic must be negative "
            "(the group would be elementary otherwise)");
}

bool Presentation::inAlphabet(GenId g) const {
    if (g.kind == GenKind::H) return true;
    return std::find(generators.begin(), generators.end(), g) != generators.end();
}

int Presentation::orientation(GenId g) const {
    if (!signature.orientable && g.kind == GenKind::A) return -1;
    return +1;
}

int Presentation::orientation(const GroupWord& w) const {
    int s = +1;
    for (const Letter& l : w.letters) s *= orientation(l.gen);
    return s;
}

GroupWord Presentation::longRelationRhs() const {
    GroupWord w;
    if (signature.orientable) {
        for (int i = 1; i <= signature.genus; ++i) {
            GenId a{GenKind::A, i}, b{GenKind::B, i};
            w.letters.push_back({a, +1});
            w.letters.push_back({b, +1});
            w.letters.push_back({a, -1});
            w.letters.push_back({b, -1});
        }
    } else {
        for (int i = 1; i <= signature.genus; ++i) {
            GenId a{GenKind::A, i};
            w.letters.push_back({a, +1});
            w.letters.push_back({a, +1});
        }
    }
    for (int j = 1; j <= p(); ++j) w.letters.push_back({{GenKind::D, j}, +1});
    return w;
}

Presentation buildPresentation(const OrbifoldSignature& sig) {
    sig.validate();
    Presentation pres;
    pres.signature = sig;

    for (int i = 1; i <= sig.genus; ++i) {
        pres.generators.push_back({GenKind::A, i});
        if (sig.orientable) pres.generators.push_back({GenKind::B, i});
    }
    for (int j = 1; j <= sig.p(); ++j) pres.generators.push_back({GenKind::D, j});
    for (int i = 1; i <= sig.boundaryCount; ++i) pres.generators.push_back({GenKind::C, i});

    pres.derivedBoundary = {GenKind::C, sig.boundaryCount};
    for (GenId g : pres.generators)
        if (!(g == pres.derivedBoundary)) pres.freeGenerators.push_back(g);

    for (int j = 1; j <= sig.p(); ++j) {
        Relation r;
        for (int m = 0; m < sig.coneOrders[j - 1]; ++m)
            r.lhs.letters.push_back({{GenKind::D, j}, +1});
        r.name = "torsion d" + std::to_string(j);
        pres.relations.push_back(std::move(r));
    }
    Relation longRel;
    for (int i = 1; i <= sig.boundaryCount; ++i)
        longRel.lhs.letters.push_back({{GenKind::C, i}, +1});
    longRel.rhs = pres.longRelationRhs();
    longRel.name = "boundary product";
    pres.relations.push_back(std::move(longRel));
    return pres;
}

namespace {

// Stack reduction step shared by the normal form: pushes one letter,
// cancelling inverses and merging torsion runs mod alpha_j.
void pushReduced(std::vector<Letter>& stack, Letter l, const Presentation& pres) {
    if (l.gen.kind == GenKind::D) {
        int alpha = pres.coneOrder(l.gen.index);
        int run = (l.exp > 0) ? 1 : alpha - 1;  // d^-1 == d^{alpha-1}
        while (!stack.empty() && stack.back().gen == l.gen) {
            run += (stack.back().exp > 0) ? 1 : alpha - 1;
            stack.pop_back();
        }
        run %= alpha;
        for (int m = 0; m < run; ++m) stack.push_back({l.gen, +1});
        return;
    }
    if (!stack.empty() && stack.back().gen == l.gen && stack.back().exp == -l.exp) {
        // Cancelling may expose a torsion run split by the pair; re-merge it.
        stack.pop_back();
        if (!stack.empty() && stack.back().gen.kind == GenKind::D) {
            Letter t = stack.back();
            stack.pop_back();
            pushReduced(stack, t, pres);
        }
        return;
    }
    stack.push_back(l);
}

}  // namespace

GroupWord freeNormalForm(const GroupWord& w, const Presentation& pres) {
    std::vector<Letter> stack;
    stack.reserve(w.letters.size());
    // Substitution queue lets the derived boundary letter expand in place.
    std::vector<Letter> pending(w.letters.rbegin(), w.letters.rend());
    while (!pending.empty()) {
        Letter l = pending.back();
        pending.pop_back();
        if (l.gen.kind == GenKind::H)
            throw std::invalid_argument("freeNormalForm: h is central, not part of the free product");
        if (!pres.inAlphabet(l.gen))
            throw std::invalid_argument("freeNormalForm: unknown generator " + genName(l.gen));
        if (pres.isDerived(l.gen)) {
            GroupWord sub = boundaryWord(pres, l.gen.index);
            if (l.exp < 0) sub = sub.inverse();
            for (auto it = sub.letters.rbegin(); it != sub.letters.rend(); ++it)
                pending.push_back(*it);
            continue;
        }
        pushReduced(stack, l, pres);
    }
    return GroupWord(std::move(stack));
}

GroupWord boundaryWord(const Presentation& pres, int i) {
    if (i < 1 || i > pres.q()) throw std::invalid_argument("boundaryWord: index out of range");
    if (!(pres.derivedBoundary == GenId{GenKind::C, i})) return GroupWord::one({GenKind::C, i});
    // Solve c_1 ... c_q = [a_1,b_1]...[a_g,b_g] d_1...d_p for the derived letter:
    // c_i = (c_1 ... c_{i-1})^{-1} W (c_{i+1} ... c_q)^{-1}.
    GroupWord prefix, suffix;
    for (int m = 1; m < i; ++m) prefix.letters.push_back({{GenKind::C, m}, +1});
    for (int m = i + 1; m <= pres.q(); ++m) suffix.letters.push_back({{GenKind::C, m}, +1});
    GroupWord w = prefix.inverse().concat(pres.longRelationRhs()).concat(suffix.inverse());
    // Reduce without re-entering the derived substitution (w has none).
    std::vector<Letter> stack;
    for (const Letter& l : w.letters) pushReduced(stack, l, pres);
    return GroupWord(std::move(stack));
}

std::string Presentation::toJson() const {
    std::ostringstream os;
    os << "{\"signature\":{\"genus\":" << signature.genus
       << ",\"orientable\":" << (signature.orientable ? "true" : "false") << ",\"coneOrders\":[";
    for (size_t j = 0; j < signature.coneOrders.size(); ++j)
        os << (j ? "," : "") << signature.coneOrders[j];
    os << "],\"boundaryCount\":" << signature.boundaryCount
       << ",\"coverDegree\":" << signature.coverDegree << "},\"generators\":[";
    for (size_t i = 0; i < generators.size(); ++i)
        os << (i ? "," : "") << '"' << genName(generators[i]) << '"';
    os << "],\"relations\":[";
    for (size_t i = 0; i < relations.size(); ++i) {
        os << (i ? "," : "") << "{\"name\":\"" << relations[i].name << "\",\"lhs\":\""
           << relations[i].lhs.str() << "\",\"rhs\":\"" << relations[i].rhs.str() << "\"}";
    }
    os << "],\"derivedBoundary\":\"" << genName(derivedBoundary) << "\"}";
    return os.str();
}

}  // namespace lozlab
