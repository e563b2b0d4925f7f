#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lozlab/presentation.hpp"

namespace lozlab {

// 2x2 real matrix acting projectively on the circle of directions.
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;  // [[a, b], [c, d]]

    double det() const { return a * d - b * c; }
    Mat2 times(const Mat2& o) const;
    Mat2 inverseMat() const;
    // Rescaled so |det| == 1.
    Mat2 normalized() const;
    static Mat2 rotation(double angle);
    static Mat2 diag(double x, double y);
    // Hyperbolic (or glide-reflection when reversing) element with the
    // attracting eigendirection at circle coordinate attract and the repelling
    // one at repel; strength lambda > 1.
    static Mat2 axis(double attract, double repel, double lambda, int k, bool reversing = false);
};

// Monotone piecewise-linear map on a closed interval, used for blow profiles
// and override rules.  Strictly increasing knot sequences in both coordinates.
struct PLMap {
    std::vector<double> xs;
    std::vector<double> ys;

    double lo() const { return xs.front(); }
    double hi() const { return xs.back(); }
    double eval(double x) const;
    double evalInverse(double y) const;
    // Natural log of the slope at x; flags when x sits on a knot.
    double logSlope(double x, bool* atKnot = nullptr) const;
    void validate() const;
};

class RepCore;

// One override rule: on (lo, hi) the map is  x -> post( profile^e( pre(x) ) )
// where pre/post are words evaluated through a frozen representation core.
struct OverrideRule {
    double lo = 0, hi = 0;  // domain interval; lo reduced into [0,1)
    PLMap profile;
    int profileExp = +1;
    GroupWord pre;   // applied first
    GroupWord post;  // applied last
    std::shared_ptr<const RepCore> core;  // evaluation context for pre/post
    double imgLo = 0, imgHi = 0;          // cached image interval
};

// A lift of a circle homeomorphism: strictly monotone map of the line with
// f(x + 1) = f(x) + orientation.  The base map is projective, a translation,
// or an explicit piecewise map on a fundamental domain; finitely many
// interval overrides may replace it inside gaps.
class LiftedHomeo {
  public:
    enum class BaseKind { Projective, Translation, Piecewise };

    static LiftedHomeo projective(Mat2 m, int k);
    static LiftedHomeo translation(double amount);
    // knots on [0, 1] with values[front] arbitrary, values[back] = values[front]+1.
    static LiftedHomeo piecewise(PLMap fundamental);

    int orientation() const { return orientation_; }
    int coverDegree() const { return k_; }
    BaseKind baseKind() const { return kind_; }
    const Mat2& matrix() const { return mat_; }
    double translationAmount() const { return amount_; }
    // Lift offset in units of 1/k (post-composition with tau0^offset).
    int liftOffset() const { return liftOffset_; }
    LiftedHomeo withLiftOffset(int offset) const;
    const std::vector<OverrideRule>& overrides() const { return overrides_; }
    // Returns a copy with one more override; checks endpoint agreement with
    // the current map and disjointness from existing overrides.
    LiftedHomeo withOverride(OverrideRule rule, double glueTol = 1e-7) const;

    double eval(double x) const;
    double evalInverse(double y) const;
    // log |f'(x)|; one-sided at breakpoints (flag set).
    double logDerivative(double x, bool* atBreak = nullptr) const;

    std::string toJson() const;

  private:
    double evalBase(double x) const;
    double evalBaseInverse(double y) const;

    BaseKind kind_ = BaseKind::Translation;
    int orientation_ = +1;
    int k_ = 1;
    Mat2 mat_;
    double amount_ = 0;         // Translation base
    PLMap fundamental_;         // Piecewise base
    int liftOffset_ = 0;
    double baseAt0_ = 0;        // canonical lift value at 0 (Projective)
    std::vector<OverrideRule> overrides_;
};

struct FixedPointRecord {
    double location = 0;  // in the scanned window
    enum class Type { Attracting, Repelling, Neutral } type = Type::Neutral;
    int signLeft = 0;   // sign of f(x)-x just left of the fixed point
    int signRight = 0;  // and just right
};

// Immutable map from generator letters to lifted homeomorphisms.  The derived
// boundary letter is evaluated through its defining word, so patches to free
// letters propagate to it.
class RepCore {
  public:
    RepCore(Presentation pres, std::map<GenId, LiftedHomeo> gens);

    const Presentation& presentation() const { return pres_; }
    int coverDegree() const { return pres_.signature.coverDegree; }
    bool hasConcrete(GenId g) const { return gens_.count(g) > 0; }
    const LiftedHomeo& map(GenId g) const;
    const std::map<GenId, LiftedHomeo>& maps() const { return gens_; }
    // Extra lift offset (units of 1/k) applied after the derived letter's word.
    int derivedOffset() const { return derivedOffset_; }
    void setDerivedOffset(int off) { derivedOffset_ = off; }
    // Word route for letters without a concrete map (the derived boundary).
    GroupWord derivedWord(GenId g) const;

    double evalLetter(Letter l, double x) const;
    double eval(const GroupWord& w, double x) const;
    double evalInverse(const GroupWord& w, double y) const;
    double logDerivative(const GroupWord& w, double x, bool* atBreak = nullptr) const;

  private:
    Presentation pres_;
    std::map<GenId, LiftedHomeo> gens_;
    int derivedOffset_ = 0;
};

class Representation {
  public:
    Representation() = default;
    explicit Representation(std::shared_ptr<const RepCore> core) : core_(std::move(core)) {}

    const std::shared_ptr<const RepCore>& core() const { return core_; }
    const Presentation& presentation() const { return core_->presentation(); }
    int coverDegree() const { return core_->coverDegree(); }
    int orientation(const GroupWord& w) const { return presentation().orientation(w); }

    double evaluate(const GroupWord& w, double x) const { return core_->eval(w, x); }
    double evaluateInverse(const GroupWord& w, double y) const { return core_->evalInverse(w, y); }
    double logDerivative(const GroupWord& w, double x, bool* atBreak = nullptr) const {
        return core_->logDerivative(w, x, atBreak);
    }
    std::vector<FixedPointRecord> fixedPoints(const GroupWord& w, double windowLo = 0.0,
                                              int gridPoints = 4096, double tol = 1e-12) const;
    double translationNumber(const GroupWord& w, int iterations = 1000) const;

    // Replaces one generator's map; returns a new immutable value.
    Representation withGenerator(GenId g, LiftedHomeo map) const;
    Representation withCoreEdit(const std::function<void(RepCore&)>& edit) const;

    LiftedHomeo tau0() const { return LiftedHomeo::translation(1.0 / coverDegree()); }

  private:
    std::shared_ptr<const RepCore> core_;
};

// Monotone bisection for f(x) = y on [lo, hi]; f must be increasing.
double bisectMonotone(const std::function<double(double)>& f, double y, double lo, double hi,
                      double tol = 1e-13);

}  // namespace lozlab
