#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lozlab/circlemap.hpp"
#include "lozlab/presentation.hpp"

namespace lozlab {

// Construction failures (ping-pong violation, unrealizable lift, ...).
struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Closed arc on the 1/k-periodic circle of the base projective line.
struct ArcMod {
    double lo = 0;      // reduced into [0, period)
    double hi = 0;      // lo < hi, hi - lo < period
    double period = 1;

    double length() const { return hi - lo; }
    ArcMod normalized() const;
    bool containsPoint(double x, double tol = 0.0) const;
    bool containsArc(const ArcMod& inner, double tol = 0.0) const;
    bool intersects(const ArcMod& other, double tol = 0.0) const;
};

// A ping-pong "letter": a free generator with exponent +-1, or a torsion
// generator with a power in [1, alpha).
struct PPLetter {
    GenId gen;
    int power = 1;

    GroupWord word() const;
    friend bool operator==(const PPLetter&, const PPLetter&) = default;
};

struct InclusionEntry {
    int letterIdx = 0;
    int arcIdx = 0;
    bool ok = false;
    double margin = 0;  // signed containment margin
};

struct PingPongCertificate {
    std::vector<PPLetter> letters;
    std::vector<ArcMod> arcs;  // target arc per letter, same indexing
    std::vector<InclusionEntry> table;
    bool valid = false;

    int arcOf(const PPLetter& l) const;
    // Whether two letters belong to the same free-product factor.
    static bool sameFactor(const PPLetter& a, const PPLetter& b);
    std::string toJson() const;
};

// Recompute the inclusion table for rep; returns certificate with table/valid.
PingPongCertificate verifyCertificate(const Representation& rep, PingPongCertificate cert,
                                      double minMargin = 1e-6);

struct GeometryParams {
    bool useDefault = true;
    double lambdaHint = 0;  // 0 = adaptive
    // File mode: per-generator matrices (by generator name) plus lift offsets.
    std::map<std::string, Mat2> matrices;
    std::map<std::string, int> liftOffsets;
};

struct FuchsianResult {
    Representation rep;
    PingPongCertificate certificate;
    // Central charge of each relation in units of 1/k (torsion: d^alpha = tau^charge;
    // long relation: product side differs from rhs by tau^charge).
    std::map<std::string, int> relationCharges;
};

// Convex-cocompact representation with rho(h) = +1, boundary letters carrying
// zero translation number, and a verified ping-pong certificate.
FuchsianResult buildFuchsian(const OrbifoldSignature& sig, const GeometryParams& geom = {});

struct TwistedPair {
    Representation rho0;
    Representation rho0star;
};

// rho*(g) = rho(g) for orientation-preserving g, tau0 . rho(g) otherwise.
TwistedPair twist(const Representation& rho0);

}  // namespace lozlab
