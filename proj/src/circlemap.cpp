#include "lozlab/circlemap.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lozlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

Mat2 Mat2::times(const Mat2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
}

Mat2 Mat2::inverseMat() const {
    double dt = det();
    if (std::abs(dt) < 1e-300) throw std::invalid_argument("Mat2: singular matrix");
    return {d / dt, -b / dt, -c / dt, a / dt};
}

Mat2 Mat2::normalized() const {
    double dt = std::sqrt(std::abs(det()));
    if (dt < 1e-300) throw std::invalid_argument("Mat2: singular matrix");
    return {a / dt, b / dt, c / dt, d / dt};
}

Mat2 Mat2::rotation(double angle) {
    double cs = std::cos(angle), sn = std::sin(angle);
    return {cs, -sn, sn, cs};
}

Mat2 Mat2::diag(double x, double y) { return {x, 0, 0, y}; }

Mat2 Mat2::axis(double attract, double repel, double lambda, int k, bool reversing) {
    double ta = kPi * k * attract, tr = kPi * k * repel;
    // Columns are the eigendirections.
    Mat2 P{std::cos(ta), std::cos(tr), std::sin(ta), std::sin(tr)};
    Mat2 D = Mat2::diag(lambda, reversing ? -1.0 / lambda : 1.0 / lambda);
    return P.times(D).times(P.inverseMat()).normalized();
}

void PLMap::validate() const {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("PLMap: needs matching knot arrays of size >= 2");
    for (size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] > xs[i - 1]) || !(ys[i] > ys[i - 1]))
            throw std::invalid_argument("PLMap: knots must be strictly increasing");
}

double PLMap::eval(double x) const {
    if (x <= xs.front()) return ys.front() + (x - xs.front());
    if (x >= xs.back()) return ys.back() + (x - xs.back());
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = static_cast<size_t>(it - xs.begin());
    double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

double PLMap::evalInverse(double y) const {
    if (y <= ys.front()) return xs.front() + (y - ys.front());
    if (y >= ys.back()) return xs.back() + (y - ys.back());
    auto it = std::upper_bound(ys.begin(), ys.end(), y);
    size_t i = static_cast<size_t>(it - ys.begin());
    double t = (y - ys[i - 1]) / (ys[i] - ys[i - 1]);
    return xs[i - 1] + t * (xs[i] - xs[i - 1]);
}

double PLMap::logSlope(double x, bool* atKnot) const {
    if (atKnot) *atKnot = false;
    for (double knot : xs)
        if (std::abs(x - knot) < 1e-12 && atKnot) *atKnot = true;
    size_t i = 1;
    while (i + 1 < xs.size() && x >= xs[i]) ++i;
    return std::log((ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]));
}

namespace {

// Principal direction angle of M applied to the direction at coordinate x,
// divided by pi*k; lies in (-1/k, 1/k].
double rawAngle(const Mat2& m, double x, int k) {
    double t = kPi * k * x;
    double vx = std::cos(t), vy = std::sin(t);
    double wx = m.a * vx + m.b * vy, wy = m.c * vx + m.d * vy;
    return std::atan2(wy, wx) / (kPi * k);
}

// Canonical lift of the projective action of m (|det m| = 1): the continuous
// lift whose value at 0 lies in [0, 1/k).
double evalCanonical(const Mat2& m, double x, int k) {
    int orient = (m.det() > 0) ? +1 : -1;
    double period = 1.0 / k;
    double n = std::floor(x * k);
    double xr = x - n * period;  // in [0, 1/k)
    double r0 = rawAngle(m, 0.0, k);
    double f0 = r0 - std::floor(r0 * k) * period;  // in [0, 1/k)
    double draw = rawAngle(m, xr, k) - r0;
    double delta;
    if (orient > 0)
        delta = (draw >= 0) ? draw : draw + 2 * period;
    else
        delta = (draw <= 0) ? draw : draw - 2 * period;
    return f0 + delta + orient * n * period;
}

double logDerivCanonical(const Mat2& m, double x, int k) {
    double t = kPi * k * x;
    double vx = std::cos(t), vy = std::sin(t);
    double wx = m.a * vx + m.b * vy, wy = m.c * vx + m.d * vy;
    return -std::log(wx * wx + wy * wy);  // |det| = 1
}

}  // namespace

LiftedHomeo LiftedHomeo::projective(Mat2 m, int k) {
    LiftedHomeo f;
    f.kind_ = BaseKind::Projective;
    f.mat_ = m.normalized();
    f.k_ = k;
    f.orientation_ = (f.mat_.det() > 0) ? +1 : -1;
    f.baseAt0_ = evalCanonical(f.mat_, 0.0, k);
    return f;
}

LiftedHomeo LiftedHomeo::translation(double amount) {
    LiftedHomeo f;
    f.kind_ = BaseKind::Translation;
    f.amount_ = amount;
    f.orientation_ = +1;
    return f;
}

LiftedHomeo LiftedHomeo::piecewise(PLMap fundamental) {
    fundamental.validate();
    if (std::abs(fundamental.xs.front()) > 1e-12 || std::abs(fundamental.xs.back() - 1.0) > 1e-12 ||
        std::abs((fundamental.ys.back() - fundamental.ys.front()) - 1.0) > 1e-12)
        throw std::invalid_argument("LiftedHomeo::piecewise: fundamental domain must span [0,1] with unit rise");
    LiftedHomeo f;
    f.kind_ = BaseKind::Piecewise;
    f.fundamental_ = std::move(fundamental);
    f.orientation_ = +1;
    return f;
}

LiftedHomeo LiftedHomeo::withLiftOffset(int offset) const {
    LiftedHomeo f = *this;
    f.liftOffset_ = offset;
    return f;
}

double LiftedHomeo::evalBase(double x) const {
    switch (kind_) {
        case BaseKind::Projective:
            return evalCanonical(mat_, x, k_) + static_cast<double>(liftOffset_) / k_;
        case BaseKind::Translation:
            return x + amount_ + static_cast<double>(liftOffset_) / k_;
        case BaseKind::Piecewise: {
            double n = std::floor(x);
            return fundamental_.eval(x - n) + n + static_cast<double>(liftOffset_) / k_;
        }
    }
    return x;
}

double LiftedHomeo::evalBaseInverse(double y) const {
    double yAdj = y - static_cast<double>(liftOffset_) / k_;
    switch (kind_) {
        case BaseKind::Projective: {
            Mat2 inv = mat_.inverseMat().normalized();
            // The canonical lifts of m and inv differ from true inverses by a
            // tau-power; calibrate it at one point.
            double z = evalCanonical(mat_, evalCanonical(inv, 0.0, k_), k_);
            double m = std::round(z * k_);
            return evalCanonical(inv, yAdj - m / k_, k_);
        }
        case BaseKind::Translation:
            return yAdj - amount_;
        case BaseKind::Piecewise: {
            double n = std::floor(yAdj - fundamental_.ys.front());
            double yr = yAdj - n;
            if (yr < fundamental_.ys.front()) { yr += 1; n -= 1; }
            if (yr > fundamental_.ys.back()) { yr -= 1; n += 1; }
            return fundamental_.evalInverse(yr) + n;
        }
    }
    return y;
}

namespace {

double applyRule(const OverrideRule& r, double x);
double applyRuleInverse(const OverrideRule& r, double y);

double evalWordThrough(const std::shared_ptr<const RepCore>& core, const GroupWord& w, double x) {
    if (w.empty()) return x;
    if (!core) throw std::logic_error("OverrideRule: nonempty word but no evaluation core");
    return core->eval(w, x);
}

double applyRule(const OverrideRule& r, double x) {
    double y = evalWordThrough(r.core, r.pre, x);
    y = (r.profileExp > 0) ? r.profile.eval(y) : r.profile.evalInverse(y);
    return evalWordThrough(r.core, r.post, y);
}

double applyRuleInverse(const OverrideRule& r, double y) {
    double x = evalWordThrough(r.core, r.post.inverse(), y);
    x = (r.profileExp > 0) ? r.profile.evalInverse(x) : r.profile.eval(x);
    return evalWordThrough(r.core, r.pre.inverse(), x);
}

double ruleLogDeriv(const OverrideRule& r, double x, const RepCore* fallbackCore, bool* atBreak) {
    double acc = 0;
    double y = x;
    const RepCore* core = r.core ? r.core.get() : fallbackCore;
    if (!r.pre.empty()) {
        acc += core->logDerivative(r.pre, y, atBreak);
        y = core->eval(r.pre, y);
    }
    bool knot = false;
    if (r.profileExp > 0) {
        acc += r.profile.logSlope(y, &knot);
        y = r.profile.eval(y);
    } else {
        double x0 = r.profile.evalInverse(y);
        acc -= r.profile.logSlope(x0, &knot);
        y = x0;
    }
    if (knot && atBreak) *atBreak = true;
    if (!r.post.empty()) {
        acc += core->logDerivative(r.post, y, atBreak);
    }
    return acc;
}

}  // namespace

LiftedHomeo LiftedHomeo::withOverride(OverrideRule rule, double glueTol) const {
    rule.profile.validate();
    if (!(rule.hi > rule.lo) || rule.hi - rule.lo >= 1.0)
        throw std::invalid_argument("override: interval must be nontrivial and shorter than a period");
    double shift = std::floor(rule.lo);
    rule.lo -= shift;
    rule.hi -= shift;
    double vLo = applyRule(rule, rule.lo), vHi = applyRule(rule, rule.hi);
    double bLo = eval(rule.lo), bHi = eval(rule.hi);
    if (std::abs(vLo - bLo) > glueTol || std::abs(vHi - bHi) > glueTol)
        throw std::invalid_argument("override: rule does not glue continuously at the interval endpoints");
    rule.imgLo = std::min(vLo, vHi);
    rule.imgHi = std::max(vLo, vHi);
    for (const OverrideRule& o : overrides_) {
        for (double n : {std::floor(rule.lo - o.lo), std::floor(rule.lo - o.lo) + 1.0})
            if (rule.lo - n < o.hi - 1e-12 && rule.hi - n > o.lo + 1e-12)
                throw std::invalid_argument("override: intervals overlap mod 1");
    }
    LiftedHomeo f = *this;
    f.overrides_.push_back(std::move(rule));
    return f;
}

double LiftedHomeo::eval(double x) const {
    for (const OverrideRule& r : overrides_) {
        double n = std::floor(x - r.lo);
        double x0 = x - n;
        if (x0 > r.lo && x0 < r.hi) return applyRule(r, x0) + orientation_ * n;
    }
    return evalBase(x);
}

double LiftedHomeo::evalInverse(double y) const {
    for (const OverrideRule& r : overrides_) {
        double m = std::floor(y - r.imgLo);
        double y0 = y - m;
        if (y0 > r.imgLo && y0 < r.imgHi) return applyRuleInverse(r, y0) + orientation_ * m;
    }
    return evalBaseInverse(y);
}

double LiftedHomeo::logDerivative(double x, bool* atBreak) const {
    for (const OverrideRule& r : overrides_) {
        double n = std::floor(x - r.lo);
        double x0 = x - n;
        if (x0 > r.lo && x0 < r.hi) return ruleLogDeriv(r, x0, nullptr, atBreak);
        if (atBreak && (std::abs(x0 - r.lo) < 1e-12 || std::abs(x0 - r.hi) < 1e-12)) *atBreak = true;
    }
    switch (kind_) {
        case BaseKind::Projective: return logDerivCanonical(mat_, x, k_);
        case BaseKind::Translation: return 0.0;
        case BaseKind::Piecewise: {
            bool knot = false;
            double v = fundamental_.logSlope(x - std::floor(x), &knot);
            if (knot && atBreak) *atBreak = true;
            return v;
        }
    }
    return 0.0;
}

std::string LiftedHomeo::toJson() const {
    std::ostringstream os;
    os << "{\"orientation\":" << orientation_ << ",\"liftOffset\":" << liftOffset_ << ",\"base\":";
    switch (kind_) {
        case BaseKind::Projective:
            os << "{\"kind\":\"projective\",\"matrix\":[" << fmt17(mat_.a) << ',' << fmt17(mat_.b)
               << ',' << fmt17(mat_.c) << ',' << fmt17(mat_.d) << "],\"k\":" << k_ << '}';
            break;
        case BaseKind::Translation:
            os << "{\"kind\":\"translation\",\"amount\":" << fmt17(amount_) << '}';
            break;
        case BaseKind::Piecewise: {
            os << "{\"kind\":\"piecewise\",\"xs\":[";
            for (size_t i = 0; i < fundamental_.xs.size(); ++i)
                os << (i ? "," : "") << fmt17(fundamental_.xs[i]);
            os << "],\"ys\":[";
            for (size_t i = 0; i < fundamental_.ys.size(); ++i)
                os << (i ? "," : "") << fmt17(fundamental_.ys[i]);
            os << "]}";
            break;
        }
    }
    os << ",\"overrides\":[";
    for (size_t i = 0; i < overrides_.size(); ++i) {
        const OverrideRule& r = overrides_[i];
        os << (i ? "," : "") << "{\"lo\":" << fmt17(r.lo) << ",\"hi\":" << fmt17(r.hi)
           << ",\"profileExp\":" << r.profileExp << ",\"pre\":\"" << r.pre.str() << "\",\"post\":\""
           << r.post.str() << "\",\"profile\":{\"xs\":[";
        for (size_t j = 0; j < r.profile.xs.size(); ++j) os << (j ? "," : "") << fmt17(r.profile.xs[j]);
        os << "],\"ys\":[";
        for (size_t j = 0; j < r.profile.ys.size(); ++j) os << (j ? "," : "") << fmt17(r.profile.ys[j]);
        os << "]}}";
    }
    os << "]}";
    return os.str();
}

RepCore::RepCore(Presentation pres, std::map<GenId, LiftedHomeo> gens)
    : pres_(std::move(pres)), gens_(std::move(gens)) {}

const LiftedHomeo& RepCore::map(GenId g) const {
    auto it = gens_.find(g);
    if (it == gens_.end())
        throw std::invalid_argument("RepCore: no concrete map for " + genName(g));
    return it->second;
}

GroupWord RepCore::derivedWord(GenId g) const {
    if (g.kind != GenKind::C || !pres_.isDerived(g))
        throw std::invalid_argument("RepCore: " + genName(g) + " has no word route");
    return boundaryWord(pres_, g.index);
}

double RepCore::evalLetter(Letter l, double x) const {
    if (l.gen.kind == GenKind::H) return x + l.exp;
    auto it = gens_.find(l.gen);
    if (it != gens_.end())
        return (l.exp > 0) ? it->second.eval(x) : it->second.evalInverse(x);
    GroupWord w = derivedWord(l.gen);
    double off = static_cast<double>(derivedOffset_) / coverDegree();
    if (l.exp > 0) return eval(w, x) + off;
    return eval(w.inverse(), x - off);
}

double RepCore::eval(const GroupWord& w, double x) const {
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) x = evalLetter(*it, x);
    return x;
}

double RepCore::evalInverse(const GroupWord& w, double y) const { return eval(w.inverse(), y); }

double RepCore::logDerivative(const GroupWord& w, double x, bool* atBreak) const {
    double acc = 0;
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) {
        Letter l = *it;
        if (l.gen.kind == GenKind::H) {
            x += l.exp;
            continue;
        }
        auto g = gens_.find(l.gen);
        if (g != gens_.end()) {
            if (l.exp > 0) {
                acc += g->second.logDerivative(x, atBreak);
                x = g->second.eval(x);
            } else {
                double x0 = g->second.evalInverse(x);
                acc -= g->second.logDerivative(x0, atBreak);
                x = x0;
            }
            continue;
        }
        GroupWord dw = derivedWord(l.gen);
        double off = static_cast<double>(derivedOffset_) / coverDegree();
        if (l.exp > 0) {
            acc += logDerivative(dw, x, atBreak);
            x = eval(dw, x) + off;
        } else {
            double x0 = eval(dw.inverse(), x - off);
            acc -= logDerivative(dw, x0, atBreak);
            x = x0;
        }
    }
    return acc;
}

std::vector<FixedPointRecord> Representation::fixedPoints(const GroupWord& w, double windowLo,
                                                          int gridPoints, double tol) const {
    std::vector<FixedPointRecord> out;
    auto disp = [&](double x) { return evaluate(w, x) - x; };
    // Half-step offset keeps grid nodes off fixed points at round coordinates.
    double step = 1.0 / gridPoints;
    auto node = [&](int i) { return windowLo + (i + 0.5) * step; };
    std::vector<double> g(gridPoints + 1);
    for (int i = 0; i <= gridPoints; ++i) g[i] = disp(node(i));
    int lastNonzero = -1;
    for (int i = 0; i <= gridPoints; ++i) {
        if (g[i] == 0.0) continue;
        if (lastNonzero >= 0 && ((g[lastNonzero] > 0) != (g[i] > 0))) {
            FixedPointRecord rec;
            if (i == lastNonzero + 1) {
                double lo = node(lastNonzero), hi = node(i), gl = g[lastNonzero];
                for (int it = 0; it < 80 && hi - lo > tol; ++it) {
                    double mid = 0.5 * (lo + hi), gm = disp(mid);
                    if (gm == 0.0) { lo = hi = mid; break; }
                    if ((gm > 0) == (gl > 0)) { lo = mid; gl = gm; } else { hi = mid; }
                }
                rec.location = 0.5 * (lo + hi);
            } else {
                rec.location = 0.5 * (node(lastNonzero) + node(i));  // zero run
            }
            rec.signLeft = (g[lastNonzero] > 0) ? +1 : -1;
            rec.signRight = (g[i] > 0) ? +1 : -1;
            rec.type = (rec.signLeft > 0) ? FixedPointRecord::Type::Attracting
                                          : FixedPointRecord::Type::Repelling;
            out.push_back(rec);
        }
        lastNonzero = i;
    }
    // Displacement touching zero away from every located crossing: neutral.
    for (int i = 0; i <= gridPoints; ++i) {
        if (std::abs(g[i]) >= 1e-11) continue;
        double x = node(i);
        bool nearCrossing = false;
        for (const FixedPointRecord& rec : out)
            if (std::abs(x - rec.location) < 2 * step) nearCrossing = true;
        if (!nearCrossing) {
            FixedPointRecord rec;
            rec.location = x;
            rec.type = FixedPointRecord::Type::Neutral;
            out.push_back(rec);
        }
    }
    // Reduce into [windowLo, windowLo + 1), sort, and drop wrap duplicates.
    for (FixedPointRecord& rec : out)
        rec.location -= std::floor(rec.location - windowLo);
    std::sort(out.begin(), out.end(),
              [](const FixedPointRecord& a, const FixedPointRecord& b) { return a.location < b.location; });
    std::vector<FixedPointRecord> dedup;
    for (const FixedPointRecord& rec : out)
        if (dedup.empty() || rec.location - dedup.back().location > 1e-9) dedup.push_back(rec);
    return dedup;
}

double Representation::translationNumber(const GroupWord& w, int iterations) const {
    if (iterations < 1) throw std::invalid_argument("translationNumber: iterations must be >= 1");
    double x = 0.0;
    for (int i = 0; i < iterations; ++i) x = evaluate(w, x);
    return x / iterations;
}

Representation Representation::withGenerator(GenId g, LiftedHomeo map) const {
    auto gens = core_->maps();
    gens.erase(g);
    gens.emplace(g, std::move(map));
    auto next = std::make_shared<RepCore>(presentation(), std::move(gens));
    next->setDerivedOffset(core_->derivedOffset());
    return Representation(next);
}

Representation Representation::withCoreEdit(const std::function<void(RepCore&)>& edit) const {
    auto next = std::make_shared<RepCore>(presentation(), core_->maps());
    next->setDerivedOffset(core_->derivedOffset());
    edit(*next);
    return Representation(next);
}

double bisectMonotone(const std::function<double(double)>& f, double y, double lo, double hi,
                      double tol) {
    double flo = f(lo), fhi = f(hi);
    if (flo > y || fhi < y) throw std::invalid_argument("bisectMonotone: target not bracketed");
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (f(mid) < y) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace lozlab
