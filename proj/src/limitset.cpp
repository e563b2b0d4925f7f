#include "lozlab/limitset.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace lozlab {

namespace {

double reduceInto(double x, double lo, double period) {
    return x - std::floor((x - lo) / period) * period;
}

bool sameInterval(double a0, double b0, double a1, double b1, double tol = 1e-9) {
    double n = std::round(a0 - a1);
    return std::abs(a0 - a1 - n) < tol && std::abs(b0 - b1 - n) < tol;
}

}  // namespace

double MinimalSetApprox::totalLength() const {
    double s = 0;
    for (const CoverArc& a : arcs) s += a.hi - a.lo;
    return s;
}

double MinimalSetApprox::maxArcLength() const {
    double s = 0;
    for (const CoverArc& a : arcs) s = std::max(s, a.hi - a.lo);
    return s;
}

MinimalSetApprox::Membership MinimalSetApprox::classify(double x, double tol) const {
    double xr = reduceInto(x, 0.0, period);
    for (const CoverArc& a : arcs) {
        for (double cand : {xr, xr + period}) {
            if (cand >= a.lo - tol && cand <= a.hi + tol) {
                if (cand >= a.lo + tol && cand <= a.hi - tol) return Membership::Inside;
                return Membership::Unknown;
            }
        }
    }
    return Membership::Outside;
}

bool MinimalSetApprox::inCover(double x, double tol) const {
    return classify(x, tol) != Membership::Outside;
}

std::vector<std::pair<double, double>> MinimalSetApprox::complementIntervals(double x0) const {
    std::vector<std::pair<double, double>> tiled;
    int copies = static_cast<int>(std::round(1.0 / period));
    for (int j = -1; j <= copies; ++j)
        for (const CoverArc& a : arcs) {
            double lo = reduceInto(a.lo, x0, 1.0) + j * period;
            tiled.emplace_back(lo, lo + (a.hi - a.lo));
        }
    std::sort(tiled.begin(), tiled.end());
    std::vector<std::pair<double, double>> out;
    double cur = x0 - 2 * period;
    for (auto& [lo, hi] : tiled) {
        if (lo > cur + 1e-13) {
            double a = std::max(cur, x0), b = std::min(lo, x0 + 1.0);
            if (b - a > 1e-13) out.emplace_back(a, b);
        }
        cur = std::max(cur, hi);
    }
    if (cur < x0 + 1.0 - 1e-13) out.emplace_back(std::max(cur, x0), x0 + 1.0);
    return out;
}

const Gap* GapTable::find(double x, double tol) const {
    double xr = x - std::floor(x);
    for (const Gap& g : gaps) {
        if (xr > g.a + tol && xr < g.b - tol) return &g;
        double xs = xr + 1.0;  // gap may straddle the integer point
        if (xs > g.a + tol && xs < g.b - tol) return &g;
    }
    return nullptr;
}

const Gap* GapTable::representative(int orbitId) const {
    for (const Gap& g : gaps)
        if (g.orbitId == orbitId && g.isRepresentative) return &g;
    return nullptr;
}

int GapTable::orbitCount() const {
    int n = 0;
    for (const Gap& g : gaps) n = std::max(n, g.orbitId + 1);
    return n;
}

std::string GapTable::toJson() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < gaps.size(); ++i) {
        const Gap& g = gaps[i];
        os << (i ? "," : "") << "{\"a\":" << g.a << ",\"b\":" << g.b << ",\"boundary\":"
           << g.boundaryIndex << ",\"tauPhase\":" << g.tauPhase << ",\"orbit\":" << g.orbitId
           << ",\"representative\":" << (g.isRepresentative ? "true" : "false")
           << ",\"stabilizer\":\"" << g.stabilizerWord.str() << "\",\"address\":\""
           << g.address.str() << "\",\"blownS\":" << (g.blownS ? "true" : "false")
           << ",\"blownU\":" << (g.blownU ? "true" : "false") << "}";
    }
    os << "]";
    return os.str();
}

namespace {

std::vector<PPLetter> refinementLetters(const Presentation& pres) {
    std::vector<PPLetter> out;
    for (GenId g : pres.freeGenerators) {
        if (pres.isTorsion(g)) {
            for (int m = 1; m < pres.coneOrder(g.index); ++m) out.push_back({g, m});
        } else {
            out.push_back({g, +1});
            out.push_back({g, -1});
        }
    }
    return out;
}

// Whether the open interval (u, v) contains a whole arc of the system.  Arc
// windows may overhang into gaps, so only fully swallowed arcs disqualify.
bool containsWholeArc(const std::vector<ArcMod>& arcs, double u, double v, double period) {
    for (const ArcMod& a : arcs) {
        double lo = reduceInto(a.lo, u, 1.0);
        while (lo < v) {
            if (lo > u + 1e-9 && lo + a.length() < v - 1e-9) return true;
            lo += period;
        }
    }
    return false;
}

// Funnel gaps adjacent to the boundary letters' axes: intervals between
// consecutive fixed points that swallow no arc of the system.
std::vector<Gap> boundaryAxisGaps(const Representation& rep, const std::vector<ArcMod>& arcs,
                                  double period) {
    const Presentation& pres = rep.presentation();
    std::vector<Gap> reps;
    int orbitId = 0;
    for (int i = 1; i <= pres.q(); ++i) {
        GroupWord ci = GroupWord::one({GenKind::C, i});
        auto fps = rep.fixedPoints(ci);
        if (fps.size() < 2)
            throw ConstructionError("gap enumeration: boundary letter c" + std::to_string(i) +
                                    " has no axis");
        std::vector<Gap> mine;
        for (size_t m = 0; m < fps.size(); ++m) {
            double u = fps[m].location;
            double v = (m + 1 < fps.size()) ? fps[m + 1].location : fps[0].location + 1.0;
            if (containsWholeArc(arcs, u, v, period)) continue;
            Gap g;
            g.a = u - std::floor(u);
            g.b = g.a + (v - u);
            g.boundaryIndex = i;
            g.isRepresentative = true;
            bool leftRepelling = fps[m].type == FixedPointRecord::Type::Repelling;
            g.stabilizerWord = leftRepelling ? ci : ci.inverse();
            mine.push_back(g);
        }
        if (mine.empty())
            throw ConstructionError("gap enumeration: no funnel interval found for c" +
                                    std::to_string(i));
        // Group tau-translates: same interval mod 1/k.
        std::sort(mine.begin(), mine.end(), [](const Gap& x, const Gap& y) { return x.a < y.a; });
        std::vector<Gap> groupLead;
        for (Gap& g : mine) {
            int phase = -1;
            for (size_t gi = 0; gi < groupLead.size(); ++gi) {
                double da = reduceInto(g.a - groupLead[gi].a, 0.0, period);
                bool translate = (da < 1e-9 || period - da < 1e-9) &&
                                 std::abs(g.length() - groupLead[gi].length()) < 1e-9;
                if (translate) phase = static_cast<int>(gi);
            }
            if (phase < 0) {
                g.tauPhase = 0;
                g.orbitId = orbitId++;
                groupLead.push_back(g);
            } else {
                g.tauPhase = static_cast<int>(
                    std::round(reduceInto(g.a - groupLead[phase].a, 0.0, 1.0) / period));
                g.orbitId = orbitId++;
            }
            reps.push_back(g);
        }
    }
    return reps;
}

}  // namespace

MinimalSetApprox computeMinimalSet(const Representation& rep, const PingPongCertificate& cert,
                                   int depth, double epsMin) {
    const Presentation& pres = rep.presentation();
    int k = rep.coverDegree();
    double period = 1.0 / k;

    // Depth-0 gaps: funnel gaps plus letter images that remain arc-free.
    std::vector<Gap> reps = boundaryAxisGaps(rep, cert.arcs, period);
    std::vector<std::pair<double, double>> gapIvals;
    for (const Gap& g : reps) gapIvals.emplace_back(g.a, g.b);
    std::vector<PPLetter> letters = refinementLetters(pres);
    for (size_t qi = 0; qi < gapIvals.size(); ++qi) {
        auto [a, b] = gapIvals[qi];
        for (const PPLetter& l : letters) {
            GroupWord w = l.word();
            double u = rep.evaluate(w, a), v = rep.evaluate(w, b);
            if (u > v) std::swap(u, v);
            double shift = std::floor(u);
            u -= shift;
            v -= shift;
            if (containsWholeArc(cert.arcs, u, v, period)) continue;
            bool known = false;
            for (auto& [x, y] : gapIvals)
                if (sameInterval(u, v, x, y)) known = true;
            if (!known && gapIvals.size() < 512) gapIvals.emplace_back(u, v);
        }
    }

    // Tight base arcs: between consecutive depth-0 gaps, reduced mod 1/k.
    // Endpoints are stabilizer fixed points, hence minimal-set points.
    std::vector<std::pair<double, double>> ends;
    for (auto& [a, b] : gapIvals) {
        double ar = reduceInto(a, 0.0, period);
        ends.emplace_back(ar, ar + (b - a));
    }
    std::sort(ends.begin(), ends.end());
    std::vector<std::pair<double, double>> dedup;
    for (auto& e : ends)
        if (dedup.empty() || e.first - dedup.back().first > 1e-9) dedup.push_back(e);
    MinimalSetApprox msa;
    msa.period = period;
    msa.depth = depth;
    for (size_t i = 0; i < dedup.size(); ++i) {
        double lo = dedup[i].second;
        double hi = (i + 1 < dedup.size()) ? dedup[i + 1].first : dedup[0].first + period;
        if (hi - lo < 1e-12)
            throw ConstructionError("minimal set: adjacent gaps share an endpoint");
        CoverArc arc;
        arc.lo = lo;
        arc.hi = hi;
        arc.baseArc = static_cast<int>(i);
        msa.baseArcs.emplace_back(lo, hi);
        msa.arcs.push_back(arc);
    }
    for (const Gap& g : reps) {
        msa.innerPoints.push_back(g.a);
        msa.innerPoints.push_back(g.b - std::floor(g.b));
    }

    // Refinement: letter images of arcs that stay inside a single base arc.
    for (int d = 0; d < depth; ++d) {
        std::vector<CoverArc> next;
        for (const PPLetter& l : letters) {
            GroupWord lw = l.word();
            for (const CoverArc& a : msa.arcs) {
                double u = rep.evaluate(lw, a.lo), v = rep.evaluate(lw, a.hi);
                if (u > v) std::swap(u, v);
                double shift = std::floor(u / period) * period;
                u -= shift;
                v -= shift;
                bool keep = false;
                for (auto& [blo, bhi] : msa.baseArcs)
                    if (u >= blo - 1e-11 && v <= bhi + 1e-11) keep = true;
                if (!keep) continue;
                CoverArc c;
                c.lo = u;
                c.hi = v;
                c.address = lw.concat(a.address);
                c.baseArc = a.baseArc;
                next.push_back(c);
            }
        }
        std::sort(next.begin(), next.end(),
                  [](const CoverArc& x, const CoverArc& y) { return x.lo < y.lo; });
        std::vector<CoverArc> uniq;
        for (CoverArc& c : next) {
            if (!uniq.empty() && std::abs(c.lo - uniq.back().lo) < 1e-12 &&
                std::abs(c.hi - uniq.back().hi) < 1e-12)
                continue;
            if (c.hi - c.lo < 1e-14) {
                msa.truncated = true;
                continue;
            }
            uniq.push_back(std::move(c));
        }
        msa.arcs = std::move(uniq);
        if (msa.maxArcLength() < epsMin / 2 && d >= 2) {
            msa.depth = d + 1;
            break;
        }
    }
    return msa;
}

GapTable enumerateGaps(const MinimalSetApprox& msa, const Representation& rep,
                       int maxAddressLength) {
    const Presentation& pres = rep.presentation();
    GapTable table;
    table.coverDegree = rep.coverDegree();

    std::vector<ArcMod> baseArcs;
    for (auto& [lo, hi] : msa.baseArcs) baseArcs.push_back({lo, hi, msa.period});
    std::vector<Gap> reps = boundaryAxisGaps(rep, baseArcs, msa.period);
    std::vector<PPLetter> letters = refinementLetters(pres);
    auto holes = msa.complementIntervals(0.0);

    // Orbits found from two seeds may coincide; on discovery the younger seed
    // is re-rooted onto the older orbit and the walk restarts.
    for (int round = 0; round < 64; ++round) {
        std::vector<bool> matched(holes.size(), false);
        std::vector<Gap> found;
        std::deque<Gap> queue;
        bool restart = false;
        auto tryMatch = [&](const Gap& g) {
            for (size_t h = 0; h < holes.size(); ++h) {
                if (matched[h]) continue;
                auto [u, v] = holes[h];
                double n = std::round(u - g.a);
                if (g.a + n <= u + 1e-9 && v <= g.b + n + 1e-9 && std::abs(n) < 64)
                    matched[h] = true;
            }
        };
        for (Gap& g : reps) {
            tryMatch(g);
            found.push_back(g);
            queue.push_back(g);
        }
        while (!queue.empty() && !restart) {
            Gap g = queue.front();
            queue.pop_front();
            if (static_cast<int>(g.address.size()) >= maxAddressLength) continue;
            for (const PPLetter& l : letters) {
                GroupWord lw = l.word();
                double u = rep.evaluate(lw, g.a), v = rep.evaluate(lw, g.b);
                int orient = pres.orientation(lw);
                if (u > v) std::swap(u, v);
                double shift = std::floor(u);
                Gap img;
                img.a = u - shift;
                img.b = v - shift;
                img.boundaryIndex = g.boundaryIndex;
                img.tauPhase = g.tauPhase;
                img.orbitId = g.orbitId;
                img.isRepresentative = false;
                img.address = freeNormalForm(lw.concat(g.address), pres);
                GroupWord stab = (orient > 0) ? g.stabilizerWord : g.stabilizerWord.inverse();
                img.stabilizerWord = freeNormalForm(lw.concat(stab).concat(lw.inverse()), pres);
                const Gap* hit = nullptr;
                for (const Gap& f : found)
                    if (sameInterval(img.a, img.b, f.a, f.b)) hit = &f;
                if (hit) {
                    if (hit->isRepresentative && hit->orbitId != img.orbitId) {
                        // Same orbit discovered from two seeds: re-root the hit
                        // representative onto the surviving orbit and restart.
                        int dropped = hit->orbitId;
                        Gap demoted = img;
                        if (demoted.orbitId > dropped) demoted.orbitId -= 1;
                        for (size_t ri = 0; ri < reps.size(); ++ri) {
                            if (reps[ri].orbitId == dropped)
                                reps[ri] = demoted;
                            else if (reps[ri].orbitId > dropped)
                                reps[ri].orbitId -= 1;
                        }
                        restart = true;
                        break;
                    }
                    continue;
                }
                found.push_back(img);
                tryMatch(img);
                queue.push_back(img);
            }
        }
        if (restart) continue;

        // Keep representatives and every gap visible as a hole of the cover.
        for (Gap& g : found) {
            bool visible = g.isRepresentative;
            for (size_t h = 0; h < holes.size() && !visible; ++h) {
                auto [u, v] = holes[h];
                double n = std::round(u - g.a);
                if (g.a + n <= u + 1e-9 && v <= g.b + n + 1e-9 && std::abs(n) < 64) visible = true;
            }
            if (visible) table.gaps.push_back(g);
        }
        for (size_t h = 0; h < holes.size(); ++h)
            if (!matched[h])
                throw ConstructionError("gap enumeration: unresolved gap near [" +
                                        std::to_string(holes[h].first) + ", " +
                                        std::to_string(holes[h].second) +
                                        "]; increase the address length");
        std::sort(table.gaps.begin(), table.gaps.end(),
                  [](const Gap& x, const Gap& y) { return x.a < y.a; });
        return table;
    }
    throw ConstructionError("gap enumeration: orbit merging did not stabilize");
}

TauCheck tauRestriction(const MinimalSetApprox& msa, const Representation& rep, int sampleWords,
                        unsigned seed) {
    TauCheck out;
    double period = msa.period;
    for (const CoverArc& a : msa.arcs) {
        for (double e : {a.lo, a.hi}) {
            if (!msa.inCover(e + period, 1e-9)) out.worstCoverResidual = 1.0;
        }
    }
    const Presentation& pres = rep.presentation();
    std::mt19937_64 rng(seed);
    const std::vector<GenId>& gens = pres.freeGenerators;
    for (int t = 0; t < sampleWords; ++t) {
        GroupWord w;
        int len = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < len; ++i)
            w.letters.push_back({gens[rng() % gens.size()], (rng() % 2) ? +1 : -1});
        int orient = pres.orientation(w);
        for (int s = 0; s < 8; ++s) {
            const CoverArc& a = msa.arcs[rng() % msa.arcs.size()];
            double x = (rng() % 2) ? a.lo : a.hi;
            double lhs = rep.evaluate(w, x + period);
            double rhs = rep.evaluate(w, x) + orient * period;
            out.worstEquivariance = std::max(out.worstEquivariance, std::abs(lhs - rhs));
        }
    }
    out.ok = out.worstCoverResidual < 1e-9 && out.worstEquivariance < 1e-8;
    return out;
}

}  // namespace lozlab
