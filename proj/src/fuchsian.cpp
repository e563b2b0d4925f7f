#include "lozlab/fuchsian.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace lozlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double reduceMod(double x, double period) {
    double r = x - std::floor(x / period) * period;
    if (r >= period) r -= period;
    if (r < 0) r += period;
    return r;
}
}  // namespace

ArcMod ArcMod::normalized() const {
    ArcMod a = *this;
    double len = hi - lo;
    a.lo = reduceMod(lo, period);
    a.hi = a.lo + len;
    return a;
}

bool ArcMod::containsPoint(double x, double tol) const {
    double t = reduceMod(x - lo, period);
    return t <= (hi - lo) + tol;
}

bool ArcMod::containsArc(const ArcMod& inner, double tol) const {
    double t = reduceMod(inner.lo - lo, period);
    return t >= -tol && t + inner.length() <= length() + tol;
}

bool ArcMod::intersects(const ArcMod& other, double tol) const {
    double t = reduceMod(other.lo - lo, period);
    if (t < length() + tol) return true;
    double s = reduceMod(lo - other.lo, period);
    return s < other.length() + tol;
}

GroupWord PPLetter::word() const {
    GroupWord w;
    int n = std::abs(power);
    int e = (power > 0) ? +1 : -1;
    for (int i = 0; i < n; ++i) w.letters.push_back({gen, e});
    return w;
}

int PingPongCertificate::arcOf(const PPLetter& l) const {
    for (size_t i = 0; i < letters.size(); ++i)
        if (letters[i] == l) return static_cast<int>(i);
    return -1;
}

bool PingPongCertificate::sameFactor(const PPLetter& a, const PPLetter& b) {
    return a.gen == b.gen;
}

std::string PingPongCertificate::toJson() const {
    std::ostringstream os;
    os << "{\"valid\":" << (valid ? "true" : "false") << ",\"arcs\":[";
    for (size_t i = 0; i < letters.size(); ++i) {
        os << (i ? "," : "") << "{\"letter\":\"" << letters[i].word().str() << "\",\"lo\":"
           << arcs[i].lo << ",\"hi\":" << arcs[i].hi << '}';
    }
    os << "],\"inclusions\":" << table.size() << '}';
    return os.str();
}

namespace {

// Image of an arc under the lift of w; the result is normalized mod period.
ArcMod arcImage(const Representation& rep, const GroupWord& w, const ArcMod& a) {
    double u = rep.evaluate(w, a.lo), v = rep.evaluate(w, a.hi);
    if (v < u) std::swap(u, v);
    ArcMod img{u, v, a.period};
    if (img.length() >= a.period) return img;  // caller treats as failure
    return img.normalized();
}

}  // namespace

PingPongCertificate verifyCertificate(const Representation& rep, PingPongCertificate cert,
                                      double minMargin) {
    cert.table.clear();
    cert.valid = true;
    // Arcs pairwise disjoint.
    for (size_t i = 0; i < cert.arcs.size(); ++i)
        for (size_t j = i + 1; j < cert.arcs.size(); ++j)
            if (cert.arcs[i].intersects(cert.arcs[j], minMargin)) cert.valid = false;
    // Inclusion table.
    for (size_t li = 0; li < cert.letters.size(); ++li) {
        const PPLetter& l = cert.letters[li];
        GroupWord w = l.word();
        const ArcMod& target = cert.arcs[li];
        for (size_t ai = 0; ai < cert.arcs.size(); ++ai) {
            const PPLetter& owner = cert.letters[ai];
            bool tableIt;
            if (l.gen.kind == GenKind::D) {
                tableIt = !PingPongCertificate::sameFactor(l, owner);
            } else {
                // Free letter: everything except the inverse's arc must map in.
                bool isInverseArc =
                    PingPongCertificate::sameFactor(l, owner) && owner.power == -l.power;
                tableIt = !isInverseArc;
            }
            if (!tableIt) continue;
            ArcMod img = arcImage(rep, w, cert.arcs[ai]);
            InclusionEntry e;
            e.letterIdx = static_cast<int>(li);
            e.arcIdx = static_cast<int>(ai);
            if (img.length() >= img.period) {
                e.ok = false;
                e.margin = -img.period;
            } else {
                double t = reduceMod(img.lo - target.lo, img.period);
                double margin = std::min(t, target.length() - t - img.length());
                e.margin = margin;
                e.ok = margin >= minMargin;
            }
            if (!e.ok) cert.valid = false;
            cert.table.push_back(e);
        }
    }
    return cert;
}

namespace {

struct Slot {
    GenId gen;
    double att = 0, rep = 0;  // arc centers mod period
    bool reversing = false;
    bool torsion = false;
    double center = 0;  // torsion window center
};

// Window layout: one window per handle / crosscap / cone point / free
// boundary letter, in the order the long relation reads.  Keeping each
// generator's arc pair inside its own window gives the planar configuration
// whose gap stabilizers are exactly the boundary classes.
std::vector<Slot> defaultLayout(const Presentation& pres) {
    const OrbifoldSignature& sig = pres.signature;
    double period = 1.0 / sig.coverDegree;
    int windows = sig.genus + sig.p() + (sig.boundaryCount - 1);
    if (windows == 0)
        throw ConstructionError("default geometry: signature leaves no free generator to place");
    double w = period / windows;
    std::vector<Slot> slots;
    int wi = 0;
    for (int i = 1; i <= sig.genus; ++i, ++wi) {
        double base = wi * w;
        if (sig.orientable) {
            // Interleaved quadruple: the handle's axes must cross.
            slots.push_back({{GenKind::A, i}, base + 0.125 * w, base + 0.625 * w, false, false, 0});
            slots.push_back({{GenKind::B, i}, base + 0.375 * w, base + 0.875 * w, false, false, 0});
        } else {
            slots.push_back({{GenKind::A, i}, base + 0.25 * w, base + 0.75 * w, true, false, 0});
        }
    }
    for (int j = 1; j <= sig.p(); ++j, ++wi)
        slots.push_back({{GenKind::D, j}, 0, 0, false, true, (wi + 0.5) * w});
    for (int i = 1; i < sig.boundaryCount; ++i, ++wi) {
        double base = wi * w;
        slots.push_back({{GenKind::C, i}, base + 0.25 * w, base + 0.75 * w, false, false, 0});
    }
    return slots;
}

std::map<GenId, LiftedHomeo> buildMaps(const Presentation& pres, const std::vector<Slot>& slots,
                                       double lambda) {
    int k = pres.signature.coverDegree;
    std::map<GenId, LiftedHomeo> gens;
    for (const Slot& s : slots) {
        if (s.torsion) {
            int alpha = pres.coneOrder(s.gen.index);
            Mat2 h = Mat2::axis(s.center, s.center + 0.5 / k, lambda, k);
            Mat2 m = h.times(Mat2::rotation(kPi / alpha)).times(h.inverseMat());
            gens.emplace(s.gen, LiftedHomeo::projective(m, k));
        } else {
            Mat2 m = Mat2::axis(s.att, s.rep, lambda, k, s.reversing);
            gens.emplace(s.gen, LiftedHomeo::projective(m, k));
        }
    }
    return gens;
}

PingPongCertificate makeCertificate(const Representation& rep, const Presentation& pres,
                                    const std::vector<Slot>& slots, double radius) {
    int k = pres.signature.coverDegree;
    double period = 1.0 / k;
    PingPongCertificate cert;
    for (const Slot& s : slots) {
        if (s.torsion) continue;
        cert.letters.push_back({s.gen, +1});
        cert.arcs.push_back(ArcMod{s.att - radius, s.att + radius, period}.normalized());
        cert.letters.push_back({s.gen, -1});
        cert.arcs.push_back(ArcMod{s.rep - radius, s.rep + radius, period}.normalized());
    }
    // Torsion families: images of the window's complementary arc under d^m.
    for (const Slot& s : slots) {
        if (!s.torsion) continue;
        int alpha = pres.coneOrder(s.gen.index);
        double wlo = s.center - 3.5 * radius, whi = s.center + 3.5 * radius;
        for (int m = 1; m < alpha; ++m) {
            PPLetter l{s.gen, m};
            ArcMod compl_ = ArcMod{whi, wlo + period, period}.normalized();
            cert.letters.push_back(l);
            cert.arcs.push_back(arcImage(rep, l.word(), compl_));
        }
    }
    return cert;
}

}  // namespace

FuchsianResult buildFuchsian(const OrbifoldSignature& sig, const GeometryParams& geom) {
    Presentation pres = buildPresentation(sig);
    int k = sig.coverDegree;
    if (sig.p() > 0 && k > 1 && geom.useDefault)
        throw ConstructionError(
            "default geometry: torsion signatures are only realized on the base cover (k = 1); "
            "supply explicit matrices passing the order check to go further");

    std::vector<Slot> slots;
    if (geom.useDefault) {
        slots = defaultLayout(pres);
    } else {
        for (GenId g : pres.freeGenerators) {
            auto it = geom.matrices.find(genName(g));
            if (it == geom.matrices.end())
                throw ConstructionError("geometry file: missing matrix for " + genName(g));
            Slot s;
            s.gen = g;
            s.reversing = it->second.det() < 0;
            s.torsion = pres.isTorsion(g);
            slots.push_back(s);
        }
    }

    double lambda = geom.lambdaHint > 1.0 ? geom.lambdaHint : 9.0;
    std::string lastFailure;
    for (int attempt = 0; attempt < 12; ++attempt, lambda *= 2.0) {
        std::map<GenId, LiftedHomeo> gens;
        double radius = 0;
        if (geom.useDefault) {
            gens = buildMaps(pres, slots, lambda);
            int windows = sig.genus + sig.p() + (sig.boundaryCount - 1);
            radius = (1.0 / k) / windows / 10.0;
        } else {
            for (const Slot& s : slots) {
                LiftedHomeo f = LiftedHomeo::projective(geom.matrices.at(genName(s.gen)), k);
                auto off = geom.liftOffsets.find(genName(s.gen));
                if (off != geom.liftOffsets.end()) f = f.withLiftOffset(off->second);
                gens.emplace(s.gen, f);
            }
        }
        Representation rep(std::make_shared<RepCore>(pres, std::move(gens)));

        // File mode: recover slot centers from each letter's axis, then take a
        // conservative shared radius.
        if (!geom.useDefault) {
            double minGap = 1.0 / k;
            for (Slot& s : slots) {
                if (s.torsion) continue;
                auto fps = rep.fixedPoints(GroupWord::one(s.gen));
                for (const auto& f : fps) {
                    if (f.type == FixedPointRecord::Type::Attracting) s.att = f.location;
                    if (f.type == FixedPointRecord::Type::Repelling) s.rep = f.location;
                }
            }
            for (size_t i = 0; i < slots.size(); ++i)
                for (size_t j = i + 1; j < slots.size(); ++j)
                    for (double u : {slots[i].att, slots[i].rep})
                        for (double v : {slots[j].att, slots[j].rep}) {
                            double d = reduceMod(u - v, 1.0 / k);
                            d = std::min(d, 1.0 / k - d);
                            minGap = std::min(minGap, d);
                        }
            radius = minGap / 4.0;
        }

        // Boundary letters need translation number zero.
        for (int i = 1; i < pres.q(); ++i) {
            GenId c{GenKind::C, i};
            double t = rep.translationNumber(GroupWord::one(c), 400);
            int off = -static_cast<int>(std::round(t * k));
            if (off != 0) {
                const LiftedHomeo& cur = rep.core()->map(c);
                rep = rep.withGenerator(c, cur.withLiftOffset(cur.liftOffset() + off));
            }
        }
        // Derived boundary letter: its central class is forced by the others;
        // only h-multiples can be absorbed.
        {
            GenId cq = pres.derivedBoundary;
            double t = rep.translationNumber(GroupWord::one(cq), 400);
            int off = -static_cast<int>(std::round(t * k));
            if (off % k != 0)
                throw ConstructionError(
                    "derived boundary letter cannot carry fixed points on this k-cover (central "
                    "charge " +
                    std::to_string(-off) + " is not divisible by k)");
            if (off != 0)
                rep = rep.withCoreEdit(
                    [&](RepCore& core) { core.setDerivedOffset(core.derivedOffset() + off); });
        }

        PingPongCertificate cert = makeCertificate(rep, pres, slots, radius);
        cert = verifyCertificate(rep, cert, 1e-6);
        if (!cert.valid) {
            lastFailure = "ping-pong inclusion failed at strength " + std::to_string(lambda);
            if (!geom.useDefault) break;
            continue;
        }

        // Boundary letters must now carry 2k hyperbolic fixed points per period.
        bool fpOk = true;
        for (int i = 1; i <= pres.q(); ++i) {
            auto fps = rep.fixedPoints(GroupWord::one({GenKind::C, i}));
            if (fps.size() != 2 * static_cast<size_t>(k)) fpOk = false;
            for (const auto& f : fps)
                if (f.type == FixedPointRecord::Type::Neutral) fpOk = false;
        }
        if (!fpOk) {
            lastFailure = "boundary letter fixed-point audit failed";
            if (!geom.useDefault) break;
            continue;
        }

        FuchsianResult result{rep, cert, {}};
        bool relOk = true;
        for (const Relation& r : pres.relations) {
            double c0 = rep.evaluate(r.lhs, 0.1234) - rep.evaluate(r.rhs, 0.1234);
            double c1 = rep.evaluate(r.lhs, 0.5678) - rep.evaluate(r.rhs, 0.5678);
            if (std::abs(c0 - c1) > 1e-9) relOk = false;
            int charge = static_cast<int>(std::round(c0 * k));
            if (std::abs(c0 * k - charge) > 1e-8) relOk = false;
            result.relationCharges[r.name] = charge;
        }
        if (!relOk) {
            lastFailure = "a relation closed up to a non-central error";
            if (!geom.useDefault) break;
            continue;
        }
        return result;
    }
    throw ConstructionError("buildFuchsian: " + (lastFailure.empty()
                                                     ? std::string("no admissible geometry found")
                                                     : lastFailure));
}

TwistedPair twist(const Representation& rho0) {
    const Presentation& pres = rho0.presentation();
    bool anyReversing = false;
    std::map<GenId, LiftedHomeo> gens;
    for (const auto& [g, f] : rho0.core()->maps()) {
        if (pres.orientation(g) < 0) {
            anyReversing = true;
            gens.emplace(g, f.withLiftOffset(f.liftOffset() + 1));
        } else {
            gens.emplace(g, f);
        }
    }
    if (!anyReversing) return {rho0, rho0};
    auto core = std::make_shared<RepCore>(pres, std::move(gens));
    core->setDerivedOffset(rho0.core()->derivedOffset());
    return {rho0, Representation(core)};
}

}  // namespace lozlab
