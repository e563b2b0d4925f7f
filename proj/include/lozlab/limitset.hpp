#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lozlab/circlemap.hpp"
#include "lozlab/fuchsian.hpp"
#include "lozlab/presentation.hpp"

namespace lozlab {

// One interval of the refinement cover, carried with the word that produced
// it; endpoints are images of minimal-set points, hence lie in the set.
struct CoverArc {
    double lo = 0, hi = 0;  // reduced into [0, period)
    GroupWord address;      // word applied to the base arc
    int baseArc = -1;
};

// Depth-bounded interval cover of the minimal invariant set, periodic of
// period 1/k by construction.
struct MinimalSetApprox {
    int depth = 0;
    double period = 1;
    bool truncated = false;                 // refinement hit interval resolution
    std::vector<CoverArc> arcs;             // sorted by lo within [0, period)
    std::vector<std::pair<double, double>> baseArcs;  // depth-0 tight arcs
    std::vector<double> innerPoints;        // boundary-conjugate fixed points

    double totalLength() const;
    double maxArcLength() const;
    // inside / outside / unknown (within tol of an arc endpoint).
    enum class Membership { Inside, Outside, Unknown };
    Membership classify(double x, double tol = 1e-12) const;
    bool inCover(double x, double tol = 0.0) const;
    // Complement intervals per unit period [x0, x0+1), sorted.
    std::vector<std::pair<double, double>> complementIntervals(double x0 = 0.0) const;
};

struct Gap {
    double a = 0, b = 0;        // open interval ]a,b[, a reduced into [0,1)
    int boundaryIndex = 0;      // stabilizer conjugacy class c_i
    int tauPhase = 0;           // representative translate j/k this orbit sits on
    int orbitId = 0;
    bool isRepresentative = false;
    GroupWord stabilizerWord;   // fixes a and b; a repelling, b attracting
    GroupWord address;          // gap = address(representative gap)
    std::vector<double> profileFixedPointsS;  // interior fixed points after blow-up
    std::vector<double> profileFixedPointsU;
    bool blownS = false, blownU = false;

    double length() const { return b - a; }
};

struct GapTable {
    std::vector<Gap> gaps;  // sorted by a, representatives first in orbit order
    int coverDegree = 1;

    // Gap whose open interval contains x (mod 1); nullptr when none matches.
    const Gap* find(double x, double tol = 1e-11) const;
    const Gap* representative(int orbitId) const;
    int orbitCount() const;
    std::string toJson() const;
};

// Depth-refined cover.  Arc endpoints are fixed points of gap stabilizers, so
// the cover is exactly invariant under modifications supported in gaps.
MinimalSetApprox computeMinimalSet(const Representation& rep, const PingPongCertificate& cert,
                                   int depth, double epsMin = 1e-4);

// Enumerate gaps exposed by the cover: representative gaps adjacent to the
// boundary letters' axes plus their orbit out to maxAddressLength.
GapTable enumerateGaps(const MinimalSetApprox& msa, const Representation& rep,
                       int maxAddressLength = 8);

struct TauCheck {
    bool ok = false;
    double worstCoverResidual = 0;   // cover vs cover shifted by 1/k
    double worstEquivariance = 0;    // almost-commutation residual on the set
};

// tau(x) = x + 1/k as a verified self-map of the cover.
TauCheck tauRestriction(const MinimalSetApprox& msa, const Representation& rep,
                        int sampleWords = 20, unsigned seed = 1);

}  // namespace lozlab
