#include "nbk/actions.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace nbk {

int FiniteAction::order() const { return generator().order; }

const ActionGenerator& FiniteAction::generator() const {
  if (!is_cyclic()) throw std::invalid_argument("action " + name + " is not cyclic");
  return generators.front();
}

ActionFormatError::ActionFormatError(int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

// ---------------------------------------------------------------------------
// parser

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

long parse_long(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ActionFormatError(line, "expected an integer, got '" + s + "'");
  }
}

// Contents of "name(...)" or nullopt.
std::optional<std::string> call_args(const std::string& tok, const std::string& name) {
  if (tok.size() < name.size() + 2 || tok.compare(0, name.size() + 1, name + "(") != 0 || tok.back() != ')')
    return std::nullopt;
  return tok.substr(name.size() + 1, tok.size() - name.size() - 2);
}

}  // namespace

ActionSpec ActionSpec::parse(std::string_view text) {
  ActionSpec spec;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  std::map<std::string, int> gen_index;
  std::vector<std::vector<int>> image_lines;

  auto label_index = [&](const std::string& l) -> int {
    auto it = std::find(spec.labels_.begin(), spec.labels_.end(), l);
    return it == spec.labels_.end() ? -1 : static_cast<int>(it - spec.labels_.begin());
  };

  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (const auto arrow = line.find("->"); arrow != std::string::npos) {
      const auto colon = line.find(':');
      if (colon == std::string::npos || colon > arrow) throw ActionFormatError(lineno, "expected 'G: L -> image'");
      const std::string gname = trim(line.substr(0, colon));
      const std::string lname = trim(line.substr(colon + 1, arrow - colon - 1));
      auto git = gen_index.find(gname);
      if (git == gen_index.end()) throw ActionFormatError(lineno, "undeclared group generator '" + gname + "'");
      const int li = label_index(lname);
      if (li < 0) throw ActionFormatError(lineno, "unknown torus generator '" + lname + "'");
      auto& gen = spec.generators_[static_cast<std::size_t>(git->second)];
      if (gen.images[static_cast<std::size_t>(li)])
        throw ActionFormatError(lineno, "duplicate image for " + gname + " |> " + lname);

      Image img;
      for (std::string tok : split_ws(line.substr(arrow + 2))) {
        if (tok == "*" || tok == "·") continue;
        while (!tok.empty() && tok.front() == '-') {
          img.turn += Rational(1, 2);
          tok.erase(0, 1);
        }
        if (tok.empty()) continue;
        if (tok == "i" && label_index("i") < 0) {
          img.turn += Rational(1, 4);
        } else if (auto args = call_args(tok, "root")) {
          const auto comma = args->find(',');
          if (comma == std::string::npos) throw ActionFormatError(lineno, "root(N,k) expects two arguments");
          const long n = parse_long(trim(args->substr(0, comma)), lineno);
          const long k = parse_long(trim(args->substr(comma + 1)), lineno);
          if (n <= 0) throw ActionFormatError(lineno, "root order must be positive");
          img.turn += make_rational(k, n);
        } else if (auto targ = call_args(tok, "theta")) {
          Rational b;
          try {
            b = parse_rational(trim(*targ));
          } catch (const std::exception& e) {
            throw ActionFormatError(lineno, e.what());
          }
          img.theta_b += b;
        } else if (tok.front() == '[') {
          if (tok.back() != ']') throw ActionFormatError(lineno, "unterminated monomial '" + tok + "'");
          std::vector<std::int64_t> exps;
          std::string body = tok.substr(1, tok.size() - 2);
          std::replace(body.begin(), body.end(), ',', ' ');
          for (const auto& e : split_ws(body)) exps.push_back(parse_long(e, lineno));
          if (exps.size() != spec.labels_.size())
            throw ActionFormatError(lineno, "monomial " + tok + " has wrong length");
          Monomial m(static_cast<int>(exps.size()));
          for (std::size_t i = 0; i < exps.size(); ++i) m[static_cast<int>(i)] = exps[i];
          img.word.push_back(Factor{-1, 0, m});
        } else if (std::isdigit(static_cast<unsigned char>(tok.front()))) {
          try {
            img.magnitude *= parse_rational(tok);
          } catch (const std::exception& e) {
            throw ActionFormatError(lineno, e.what());
          }
        } else {
          std::string base = tok;
          std::int64_t power = 1;
          if (base.back() == '*') {
            base.pop_back();
            power = -1;
          } else if (auto caret = base.find('^'); caret != std::string::npos) {
            power = parse_long(base.substr(caret + 1), lineno);
            base = base.substr(0, caret);
          }
          const int gi = label_index(base);
          if (gi < 0) throw ActionFormatError(lineno, "unknown factor '" + tok + "'");
          img.word.push_back(Factor{gi, power, std::nullopt});
        }
      }
      gen.images[static_cast<std::size_t>(li)] = std::move(img);
      continue;
    }

    const auto words = split_ws(line);
    const std::string& key = words.front();
    if (key == "action") {
      if (words.size() != 2) throw ActionFormatError(lineno, "usage: action NAME");
      spec.name_ = words[1];
    } else if (key == "generators") {
      if (!spec.labels_.empty()) throw ActionFormatError(lineno, "generators declared twice");
      if (words.size() < 2 || words.size() > kMaxDim + 1)
        throw ActionFormatError(lineno, "between 1 and " + std::to_string(kMaxDim) + " generators required");
      for (std::size_t i = 1; i < words.size(); ++i) {
        if (!is_identifier(words[i])) throw ActionFormatError(lineno, "bad generator name '" + words[i] + "'");
        if (label_index(words[i]) >= 0) throw ActionFormatError(lineno, "duplicate generator '" + words[i] + "'");
        spec.labels_.push_back(words[i]);
      }
    } else if (key == "group") {
      if (words.size() != 3) throw ActionFormatError(lineno, "usage: group NAME ORDER");
      if (spec.labels_.empty()) throw ActionFormatError(lineno, "'generators' must precede 'group'");
      if (!is_identifier(words[1]) || gen_index.count(words[1]))
        throw ActionFormatError(lineno, "bad or duplicate group generator '" + words[1] + "'");
      const long order = parse_long(words[2], lineno);
      if (order < 1) throw ActionFormatError(lineno, "group order must be positive");
      gen_index[words[1]] = static_cast<int>(spec.generators_.size());
      spec.generators_.push_back(Generator{words[1], static_cast<int>(order), std::vector<std::optional<Image>>(spec.labels_.size())});
      image_lines.emplace_back();
    } else if (key == "free") {
      if (words.size() != 3) throw ActionFormatError(lineno, "usage: free J K");
      const long j = parse_long(words[1], lineno) - 1;
      const long k = parse_long(words[2], lineno) - 1;
      const long d = static_cast<long>(spec.labels_.size());
      if (j < 0 || k < 0 || j >= d || k >= d || j == k) throw ActionFormatError(lineno, "bad free slot");
      spec.free_slot_ = std::make_pair(static_cast<int>(std::min(j, k)), static_cast<int>(std::max(j, k)));
    } else {
      throw ActionFormatError(lineno, "unknown directive '" + key + "'");
    }
  }

  if (spec.labels_.empty()) throw ActionFormatError(0, "no 'generators' line");
  if (spec.generators_.empty()) throw ActionFormatError(0, "no 'group' line");
  for (const auto& g : spec.generators_)
    for (std::size_t i = 0; i < g.images.size(); ++i)
      if (!g.images[i]) throw ActionFormatError(0, "missing image " + g.name + " |> " + spec.labels_[i]);
  if (spec.name_.empty()) spec.name_ = "custom";
  return spec;
}

PhasedScalar ActionSpec::Image::scalar() const {
  const Rational t = mod_rational(turn, Rational(1));
  Cyclotomic c = Cyclotomic::root(static_cast<int>(t.get_den().get_si()), t.get_num().get_si());
  c *= magnitude;
  return PhasedScalar::phased(theta_b, c);
}

FiniteAction ActionSpec::materialize(const ThetaMatrix& theta) const {
  const int d = static_cast<int>(labels_.size());
  if (theta.dim() != d) throw DimensionMismatch("action " + name_ + " needs a " + std::to_string(d) + "-dim theta");
  FiniteAction out{name_, labels_, {}};
  for (const auto& g : generators_) {
    ActionGenerator ag{g.name, g.order, {}};
    for (std::size_t i = 0; i < g.images.size(); ++i) {
      const Image& img = *g.images[i];
      PhasedScalar coeff;
      try {
        coeff = theta.normalize(img.scalar());
      } catch (const OrderMismatch& e) {
        throw ActionFormatError(0, "image " + g.name + " |> " + labels_[i] + ": " + e.what());
      }
      Monomial acc(d);
      for (const auto& f : img.word) {
        const Monomial t = f.delta ? *f.delta : f.power * Monomial::unit(d, f.generator);
        coeff = coeff * cocycle(theta, acc, t);
        acc += t;
      }
      if (!coeff.is_unit_phase())
        throw ActionFormatError(0, "image " + g.name + " |> " + labels_[i] + " is not a unitary monomial");
      ag.images.push_back(GeneratorImage{std::move(coeff), acc});
    }
    out.generators.push_back(std::move(ag));
  }
  return out;
}

ActionSpec ActionSpec::without(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw std::invalid_argument("no generator " + label + " in " + name_);
  const int drop = static_cast<int>(it - labels_.begin());
  const int d = static_cast<int>(labels_.size());
  ActionSpec r;
  r.name_ = name_;
  for (int i = 0; i < d; ++i)
    if (i != drop) r.labels_.push_back(labels_[static_cast<std::size_t>(i)]);
  auto remap = [&](int i) { return i < drop ? i : i - 1; };
  for (const auto& g : generators_) {
    Generator ng{g.name, g.order, {}};
    for (int i = 0; i < d; ++i) {
      if (i == drop) continue;
      Image img = *g.images[static_cast<std::size_t>(i)];
      for (auto& f : img.word) {
        if (f.delta) {
          if ((*f.delta)[drop] != 0) throw std::invalid_argument("image of " + labels_[static_cast<std::size_t>(i)] + " involves " + label);
          Monomial m(d - 1);
          for (int k = 0; k < d; ++k)
            if (k != drop) m[remap(k)] = (*f.delta)[k];
          f.delta = m;
        } else {
          if (f.generator == drop) throw std::invalid_argument("image of " + labels_[static_cast<std::size_t>(i)] + " involves " + label);
          f.generator = remap(f.generator);
        }
      }
      ng.images.push_back(std::move(img));
    }
    r.generators_.push_back(std::move(ng));
  }
  if (free_slot_ && free_slot_->first != drop && free_slot_->second != drop)
    r.free_slot_ = std::make_pair(remap(free_slot_->first), remap(free_slot_->second));
  return r;
}

// ---------------------------------------------------------------------------
// built-in families

namespace {

struct BuiltinText {
  const char* family;
  const char* classical;
  const char* noncommutative;  // nullptr when the family has no theta version
};

// Classical images are commutative monomials: [a,b,c] is delta_(a,b,c).
// Noncommutative images are ordered products in the twisted algebra.
constexpr BuiltinText kBuiltins[] = {
    {"B2",
     "action B2\ngenerators U V W\ngroup e 2\nfree 2 3\n"
     "e: U -> -U\ne: V -> V*\ne: W -> W*\n",
     "action B2\ngenerators U V W\ngroup e 2\nfree 2 3\n"
     "e: U -> -U\ne: V -> V*\ne: W -> W*\n"},
    {"B3",
     "action B3\ngenerators U V W\ngroup e 3\nfree 2 3\n"
     "e: U -> root(3,1) U\ne: V -> W*\ne: W -> [0,1,-1]   # W* V\n",
     "action B3\ngenerators U V W\ngroup e 3\nfree 2 3\n"
     "e: U -> root(3,1) U\ne: V -> theta(-1) V* W\ne: W -> V*\n"},
    {"B4",
     "action B4\ngenerators U V W\ngroup e 4\nfree 2 3\n"
     "e: U -> i U\ne: V -> W\ne: W -> V*\n",
     "action B4\ngenerators U V W\ngroup e 4\nfree 2 3\n"
     "e: U -> i U\ne: V -> W\ne: W -> V*\n"},
    {"B5",
     "action B5\ngenerators U V W\ngroup e1 2\ngroup e2 2\n"
     "e1: U -> -U\ne1: V -> V*\ne1: W -> W*\n"
     "e2: U -> U*\ne2: V -> -V\ne2: W -> -W*\n",
     nullptr},
    {"B6",
     "action B6\ngenerators U V W\ngroup e 6\nfree 2 3\n"
     "e: U -> root(6,1) U\ne: V -> W\ne: W -> [0,-1,1]   # W V*\n",
     "action B6\ngenerators U V W\ngroup e 6\nfree 2 3\n"
     "e: U -> root(6,1) U\ne: V -> W\ne: W -> theta(-1) V* W\n"},
    {"N1",
     "action N1\ngenerators U V W\ngroup e 2\nfree 1 2\n"
     "e: U -> -U\ne: V -> V\ne: W -> W*\n",
     "action N1\ngenerators U V W\ngroup e 2\nfree 2 3\n"
     "e: U -> U*\ne: V -> -V\ne: W -> W\n"},
    {"N2",
     "action N2\ngenerators U V W\ngroup e 2\nfree 1 2\n"
     "e: U -> -U\ne: V -> [0,1,1]   # V W\ne: W -> W*\n",
     "action N2\ngenerators U V W\ngroup e 2\nfree 2 3\n"
     "e: U -> U*\ne: V -> -V\ne: W -> W U*\n"},
    {"N3",
     "action N3\ngenerators U V W\ngroup e1 2\ngroup e2 2\n"
     "e1: U -> -U\ne1: V -> V*\ne1: W -> W*\n"
     "e2: U -> U\ne2: V -> -V\ne2: W -> W*\n",
     nullptr},
    {"N4",
     "action N4\ngenerators U V W\ngroup e1 2\ngroup e2 2\n"
     "e1: U -> -U\ne1: V -> V*\ne1: W -> W*\n"
     "e2: U -> U\ne2: V -> -V\ne2: W -> -W*\n",
     nullptr},
};

const BuiltinText* find_builtin(const std::string& family) {
  for (const auto& b : kBuiltins)
    if (family == b.family) return &b;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& classical_families() {
  static const std::vector<std::string> f{"B2", "B3", "B4", "B5", "B6", "N1", "N2", "N3", "N4"};
  return f;
}

const std::vector<std::string>& noncommutative_families() {
  static const std::vector<std::string> f{"B2", "B3", "B4", "B6", "N1", "N2"};
  return f;
}

std::string_view builtin_action_text(const std::string& family, bool noncommutative) {
  const BuiltinText* b = find_builtin(family);
  if (!b || (noncommutative && !b->noncommutative))
    throw std::invalid_argument("unknown action family: " + family);
  return noncommutative ? b->noncommutative : b->classical;
}

const ActionSpec& classical_spec(const std::string& family) {
  static const std::map<std::string, ActionSpec> specs = [] {
    std::map<std::string, ActionSpec> m;
    for (const auto& b : kBuiltins) m.emplace(b.family, ActionSpec::parse(b.classical));
    return m;
  }();
  auto it = specs.find(family);
  if (it == specs.end()) throw std::invalid_argument("unknown action family: " + family);
  return it->second;
}

const ActionSpec& noncommutative_spec(const std::string& family) {
  static const std::map<std::string, ActionSpec> specs = [] {
    std::map<std::string, ActionSpec> m;
    for (const auto& b : kBuiltins)
      if (b.noncommutative) m.emplace(b.family, ActionSpec::parse(b.noncommutative));
    return m;
  }();
  auto it = specs.find(family);
  if (it == specs.end()) throw std::invalid_argument("unknown action family: " + family);
  return it->second;
}

ThetaMatrix standard_theta(int dim) {
  ThetaMatrix t(dim);
  if (dim == 3) t.set(1, 2, ThetaEntry{Rational(0), Rational(-1)});
  else if (dim == 2) t.set(0, 1, ThetaEntry{Rational(0), Rational(-1)});
  else throw DimensionMismatch("the standard theta matrix exists in dimension 2 or 3 only");
  return t;
}

// ---------------------------------------------------------------------------
// evaluation

std::pair<PhasedScalar, Monomial> apply_monomial(const ActionGenerator& g, const ThetaMatrix& theta,
                                                 const Monomial& m) {
  const int d = theta.dim();
  if (m.dim() != d || static_cast<int>(g.images.size()) != d)
    throw DimensionMismatch("apply: action and theta dimensions differ");
  PhasedScalar coeff = PhasedScalar::one();
  PhasedScalar ordering = PhasedScalar::one();  // delta_m -> ordered product phase
  Monomial acc(d), prefix(d);
  for (int i = 0; i < d; ++i) {
    const std::int64_t k = m[i];
    if (k == 0) continue;
    const Monomial step = k * Monomial::unit(d, i);
    ordering = ordering * cocycle(theta, prefix, step);
    prefix += step;
    const auto& img = g.images[static_cast<std::size_t>(i)];
    const Monomial t = k * img.target;
    coeff = coeff * img.coeff.pow(k) * cocycle(theta, acc, t);
    acc += t;
  }
  // delta_m = conj(ordering) * ordered product, and ordering is a unit phase
  return {theta.normalize(coeff * ordering.conj()), acc};
}

TorusElement apply(const ActionGenerator& g, const ThetaMatrix& theta, const TorusElement& x) {
  TorusElement r(theta.dim());
  for (const auto& [m, c] : x.terms()) {
    auto [s, t] = apply_monomial(g, theta, m);
    r.add_term(t, theta.normalize(c * s));
  }
  return r;
}

TorusElement apply_power(const ActionGenerator& g, const ThetaMatrix& theta, const TorusElement& x, long k) {
  long r = k % g.order;
  if (r < 0) r += g.order;
  TorusElement y = x;
  for (long i = 0; i < r; ++i) y = apply(g, theta, y);
  return y;
}

TorusElement apply(const FiniteAction& action, const ThetaMatrix& theta, const TorusElement& x) {
  return apply(action.generator(), theta, x);
}

bool check_order(const FiniteAction& action, const ThetaMatrix& theta) {
  const int d = theta.dim();
  for (const auto& g : action.generators) {
    for (int i = 0; i < d; ++i) {
      const auto e = TorusElement::monomial(Monomial::unit(d, i));
      TorusElement y = e;
      for (int k = 0; k < g.order; ++k) y = apply(g, theta, y);
      if (!(y == e)) return false;
    }
  }
  return true;
}

namespace {

std::vector<Monomial> box(int d, int bound) {
  std::vector<Monomial> out;
  Monomial m(d);
  for (int i = 0; i < d; ++i) m[i] = -bound;
  while (true) {
    out.push_back(m);
    int i = d - 1;
    while (i >= 0 && m[i] == bound) m[i--] = -bound;
    if (i < 0) break;
    ++m[i];
  }
  return out;
}

std::string render(const PhasedScalar& c, const Monomial& t) { return "(" + c.str() + ")·δ" + t.str(); }

// Unit phases exp(pi i (A + B theta) / D) with A taken mod 2D. Every scalar met
// while checking a monomial action has this form, so the check runs on int64.
class PhaseArithmetic {
 public:
  struct Phase {
    std::int64_t a = 0, b = 0;
  };
  struct Image {
    Phase phase;
    Monomial target;
  };

  static std::optional<PhaseArithmetic> build(const FiniteAction& action, const ThetaMatrix& theta) {
    const int d = theta.dim();
    PhaseArithmetic pa;
    pa.d_ = d;
    std::vector<std::pair<Rational, Rational>> coeffs;  // (a, b) per image, in generator order
    Integer den = 1;
    auto absorb = [&](const Rational& q) { den = lcm(den, Integer(q.get_den())); };
    std::vector<std::pair<Rational, Rational>> entries(static_cast<std::size_t>(d * d));
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        const auto& e = theta.at(j, k);
        auto& out = entries[static_cast<std::size_t>(j * d + k)];
        out = theta.folded_theta() ? std::make_pair(Rational(e.a + e.b * *theta.folded_theta()), Rational(0))
                                   : std::make_pair(e.a, e.b);
        absorb(out.first);
        absorb(out.second);
      }
    for (const auto& g : action.generators)
      for (const auto& img : g.images) {
        if (!img.coeff.is_single_term()) return std::nullopt;
        const auto& [b, c] = img.coeff.terms().front();
        const auto k = c.as_root_of_unity();
        if (!k) return std::nullopt;
        const Rational a = make_rational(2 * *k, c.field().order());
        coeffs.emplace_back(a, b);
        absorb(a);
        absorb(b);
      }
    if (!den.fits_slong_p() || den > 1'000'000) return std::nullopt;
    pa.den_ = den.get_si();
    auto scaled = [&](const Rational& q) -> std::optional<std::int64_t> {
      const Rational v = q * den;
      if (!v.get_num().fits_slong_p() || abs(v.get_num()) > 1'000'000'000) return std::nullopt;
      return v.get_num().get_si();
    };
    for (const auto& [a, b] : entries) {
      auto sa = scaled(a), sb = scaled(b);
      if (!sa || !sb) return std::nullopt;
      pa.theta_.push_back(Phase{*sa, *sb});
    }
    std::size_t idx = 0;
    for (const auto& g : action.generators) {
      std::vector<Image> imgs;
      for (const auto& img : g.images) {
        auto sa = scaled(coeffs[idx].first), sb = scaled(coeffs[idx].second);
        ++idx;
        if (!sa || !sb) return std::nullopt;
        imgs.push_back(Image{pa.reduce(Phase{*sa, *sb}), img.target});
      }
      pa.gens_.push_back(std::move(imgs));
    }
    return pa;
  }

  Phase cocycle(const Monomial& m, const Monomial& n) const {
    Phase r;
    for (int j = 0; j < d_; ++j) {
      if (m[j] == 0) continue;
      for (int k = 0; k < d_; ++k) {
        const auto& t = theta_[static_cast<std::size_t>(j * d_ + k)];
        r.a += t.a * m[j] * n[k];
        r.b += t.b * m[j] * n[k];
      }
    }
    return reduce(r);
  }

  Phase add(Phase x, Phase y) const { return reduce(Phase{x.a + y.a, x.b + y.b}); }
  Phase scale(std::int64_t k, Phase x) const { return reduce(Phase{k * x.a, k * x.b}); }
  static bool same(Phase x, Phase y) { return x.a == y.a && x.b == y.b; }

  Image apply(std::size_t gen, const Monomial& m) const {
    const auto& imgs = gens_[gen];
    Phase coeff, ordering;
    Monomial acc(d_), prefix(d_);
    for (int i = 0; i < d_; ++i) {
      const std::int64_t k = m[i];
      if (k == 0) continue;
      const Monomial step = k * Monomial::unit(d_, i);
      ordering = add(ordering, cocycle(prefix, step));
      prefix += step;
      const auto& img = imgs[static_cast<std::size_t>(i)];
      const Monomial t = k * img.target;
      coeff = add(add(coeff, scale(k, img.phase)), cocycle(acc, t));
      acc += t;
    }
    return Image{add(coeff, scale(-1, ordering)), acc};
  }

  std::size_t generator_count() const { return gens_.size(); }

 private:
  Phase reduce(Phase x) const {
    const std::int64_t period = 2 * den_;
    x.a %= period;
    if (x.a < 0) x.a += period;
    return x;
  }

  int d_ = 0;
  std::int64_t den_ = 1;
  std::vector<Phase> theta_;
  std::vector<std::vector<Image>> gens_;
};

bool fast_compatible(const PhaseArithmetic& pa, int d, int degree_bound) {
  const auto small = box(d, degree_bound);
  const auto large = box(d, 2 * degree_bound);
  const std::int64_t side = 4 * degree_bound + 1;
  auto index = [&](const Monomial& m) {
    std::int64_t r = 0;
    for (int i = 0; i < d; ++i) r = r * side + (m[i] + 2 * degree_bound);
    return static_cast<std::size_t>(r);
  };
  for (std::size_t g = 0; g < pa.generator_count(); ++g) {
    std::vector<PhaseArithmetic::Image> img;
    img.reserve(large.size());
    for (const auto& m : large) img.push_back(pa.apply(g, m));
    for (const auto& m : small) {
      const auto& im = img[index(m)];
      for (const auto& n : small) {
        const auto& in = img[index(n)];
        const auto& imn = img[index(m + n)];
        if (imn.target != im.target + in.target) return false;
        const auto lhs = pa.add(pa.cocycle(m, n), imn.phase);
        const auto rhs = pa.add(pa.add(im.phase, in.phase), pa.cocycle(im.target, in.target));
        if (!PhaseArithmetic::same(lhs, rhs)) return false;
      }
    }
  }
  for (std::size_t a = 0; a < pa.generator_count(); ++a)
    for (std::size_t b = a + 1; b < pa.generator_count(); ++b)
      for (const auto& m : small) {
        const auto xb = pa.apply(b, m);
        const auto xab = pa.apply(a, xb.target);
        const auto xa = pa.apply(a, m);
        const auto xba = pa.apply(b, xa.target);
        if (xab.target != xba.target ||
            !PhaseArithmetic::same(pa.add(xb.phase, xab.phase), pa.add(xa.phase, xba.phase)))
          return false;
      }
  return true;
}

}  // namespace

std::optional<CompatibilityViolation> reference::find_compatibility_violation(const FiniteAction& action,
                                                                              const ThetaMatrix& theta,
                                                                              int degree_bound) {
  if (degree_bound < 1) throw std::invalid_argument("degree bound must be at least 1");
  const int d = theta.dim();
  if (action.dim() != d) throw DimensionMismatch("compatibility: dimension mismatch");
  const auto small = box(d, degree_bound);
  for (const auto& g : action.generators) {
    std::map<Monomial, std::pair<PhasedScalar, Monomial>> cache;
    auto image = [&](const Monomial& m) -> const std::pair<PhasedScalar, Monomial>& {
      auto it = cache.find(m);
      if (it == cache.end()) it = cache.emplace(m, apply_monomial(g, theta, m)).first;
      return it->second;
    };
    for (const auto& m : small) {
      const auto im = image(m);
      for (const auto& n : small) {
        const auto& in = image(n);
        const auto& imn = image(m + n);
        const PhasedScalar lhs = theta.normalize(cocycle(theta, m, n) * imn.first);
        const PhasedScalar rhs = theta.normalize(im.first * in.first * cocycle(theta, im.second, in.second));
        const Monomial rt = im.second + in.second;
        if (imn.second != rt || !(lhs == rhs))
          return CompatibilityViolation{g.name, m, n, render(lhs, imn.second), render(rhs, rt)};
      }
    }
  }
  // several generators must commute
  for (std::size_t a = 0; a < action.generators.size(); ++a) {
    for (std::size_t b = a + 1; b < action.generators.size(); ++b) {
      const auto& ga = action.generators[a];
      const auto& gb = action.generators[b];
      for (const auto& m : small) {
        const auto x = TorusElement::monomial(m);
        const auto ab = apply(ga, theta, apply(gb, theta, x));
        const auto ba = apply(gb, theta, apply(ga, theta, x));
        if (!(ab == ba))
          return CompatibilityViolation{ga.name + "·" + gb.name, m, m, ab.str(), ba.str()};
      }
    }
  }
  return std::nullopt;
}

bool reference::check_compatibility(const FiniteAction& action, const ThetaMatrix& theta, int degree_bound) {
  return !reference::find_compatibility_violation(action, theta, degree_bound).has_value();
}

bool check_compatibility(const FiniteAction& action, const ThetaMatrix& theta, int degree_bound) {
  if (degree_bound < 1) throw std::invalid_argument("degree bound must be at least 1");
  if (action.dim() != theta.dim()) throw DimensionMismatch("compatibility: dimension mismatch");
  if (auto pa = PhaseArithmetic::build(action, theta)) return fast_compatible(*pa, theta.dim(), degree_bound);
  return reference::check_compatibility(action, theta, degree_bound);
}

std::optional<CompatibilityViolation> find_compatibility_violation(const FiniteAction& action,
                                                                   const ThetaMatrix& theta,
                                                                   int degree_bound) {
  if (check_compatibility(action, theta, degree_bound)) return std::nullopt;
  return reference::find_compatibility_violation(action, theta, degree_bound);
}

// ---------------------------------------------------------------------------
// cocycle scan

namespace {

constexpr std::array<std::pair<int, int>, 3> kSlots{{{0, 1}, {0, 2}, {1, 2}}};

bool entry_less(const ThetaEntry& x, const ThetaEntry& y) {
  if (x.b != y.b) return x.b < y.b;
  return x.a < y.a;
}

ThetaEntry canonical_entry(const ThetaEntry& e) { return ThetaEntry{mod_rational(e.a, Rational(1)), e.b}; }

struct Candidate {
  ThetaTriple triple;
  ThetaMatrix theta;
};

std::vector<Candidate> candidates(const ActionSpec& spec, int denominator) {
  if (spec.labels().size() != 3) throw DimensionMismatch("cocycle scan needs a 3-dim action");
  if (denominator < 1 || denominator > 12) throw std::invalid_argument("grid denominator must be in [1, 12]");
  std::vector<int> fixed;
  for (int s = 0; s < 3; ++s)
    if (!spec.free_slot() || *spec.free_slot() != kSlots[static_cast<std::size_t>(s)]) fixed.push_back(s);
  std::vector<Candidate> out;
  std::vector<int> k(fixed.size(), 0);
  while (true) {
    ThetaTriple t{};
    for (int s = 0; s < 3; ++s) t[static_cast<std::size_t>(s)] = ThetaEntry{Rational(0), Rational(1)};
    for (std::size_t i = 0; i < fixed.size(); ++i)
      t[static_cast<std::size_t>(fixed[i])] = ThetaEntry{make_rational(k[i], denominator), Rational(0)};
    ThetaMatrix theta(3);
    for (int s = 0; s < 3; ++s)
      theta.set(kSlots[static_cast<std::size_t>(s)].first, kSlots[static_cast<std::size_t>(s)].second, t[static_cast<std::size_t>(s)]);
    out.push_back(Candidate{t, theta});
    std::size_t i = 0;
    while (i < k.size() && ++k[i] == denominator) k[i++] = 0;
    if (i == k.size()) break;
  }
  return out;
}

CocyclePattern collect(const ActionSpec& spec, const std::vector<Candidate>& cands, const std::vector<char>& ok) {
  CocyclePattern p{spec.name(), spec.free_slot(), {}};
  for (std::size_t i = 0; i < cands.size(); ++i)
    if (ok[i]) {
      ThetaTriple t = cands[i].triple;
      for (auto& e : t) e = canonical_entry(e);
      p.admissible.push_back(t);
    }
  std::sort(p.admissible.begin(), p.admissible.end(), theta_triple_less);
  p.admissible.erase(std::unique(p.admissible.begin(), p.admissible.end()), p.admissible.end());
  return p;
}

}  // namespace

bool theta_triple_less(const ThetaTriple& a, const ThetaTriple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), entry_less);
}

CocyclePattern reference::scan_cocycles(const ActionSpec& spec, int denominator, int degree_bound) {
  const auto cands = candidates(spec, denominator);
  std::vector<char> ok(cands.size(), 0);
  for (std::size_t i = 0; i < cands.size(); ++i)
    ok[i] = reference::check_compatibility(spec.materialize(cands[i].theta), cands[i].theta, degree_bound);
  return collect(spec, cands, ok);
}

CocyclePattern scan_cocycles(const ActionSpec& spec, int denominator, int degree_bound) {
  const auto cands = candidates(spec, denominator);
  std::vector<char> ok(cands.size(), 0);
  std::string error;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(cands.size()); ++i) {
    const auto& c = cands[static_cast<std::size_t>(i)];
    try {
      ok[static_cast<std::size_t>(i)] = check_compatibility(spec.materialize(c.theta), c.theta, degree_bound);
    } catch (const std::exception& e) {
#pragma omp critical(nbk_scan_error)
      if (error.empty()) error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error("cocycle scan failed: " + error);
  return collect(spec, cands, ok);
}

CocyclePattern scan_cocycles(const std::string& family, int denominator, int degree_bound) {
  return scan_cocycles(classical_spec(family), denominator, degree_bound);
}

CocyclePattern published_cocycle_table(const std::string& family, int denominator) {
  const auto& spec = classical_spec(family);
  CocyclePattern p{family, spec.free_slot(), {}};
  const ThetaEntry th{Rational(0), Rational(1)};
  auto q = [](long n, long d) { return ThetaEntry{mod_rational(make_rational(n, d), Rational(1)), Rational(0)}; };
  if (family == "B2") {
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) p.admissible.push_back({q(k, 2), q(l, 2), th});
  } else if (family == "B3" || family == "B6") {
    // the published Z_6 row repeats the Z_3 row
    for (int k = 0; k < 3; ++k) p.admissible.push_back({q(k, 3), q(3 - k, 3), th});
  } else if (family == "B4") {
    for (int k = 0; k < 2; ++k) p.admissible.push_back({q(k, 2), q(k, 2), th});
  } else if (family == "B5" || family == "N3" || family == "N4") {
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m) p.admissible.push_back({q(k, 2), q(l, 2), q(m, 2)});
  } else if (family == "N1" || family == "N2") {
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) p.admissible.push_back({th, q(k, 2), q(l, 2)});
  } else {
    throw std::invalid_argument("unknown action family: " + family);
  }
  auto off_grid = [denominator](const ThetaTriple& t) {
    return std::any_of(t.begin(), t.end(), [denominator](const ThetaEntry& e) {
      return e.b == 0 && Integer(denominator) % e.a.get_den() != 0;
    });
  };
  p.admissible.erase(std::remove_if(p.admissible.begin(), p.admissible.end(), off_grid), p.admissible.end());
  std::sort(p.admissible.begin(), p.admissible.end(), theta_triple_less);
  p.admissible.erase(std::unique(p.admissible.begin(), p.admissible.end()), p.admissible.end());
  return p;
}

std::optional<std::array<std::vector<ThetaEntry>, 3>> CocyclePattern::as_product() const {
  std::array<std::vector<ThetaEntry>, 3> sets;
  for (const auto& t : admissible)
    for (std::size_t s = 0; s < 3; ++s)
      if (std::find(sets[s].begin(), sets[s].end(), t[s]) == sets[s].end()) sets[s].push_back(t[s]);
  std::size_t total = 1;
  for (auto& s : sets) {
    std::sort(s.begin(), s.end(), entry_less);
    total *= s.size();
  }
  if (admissible.empty() || total != admissible.size()) return std::nullopt;
  return sets;
}

std::string CocyclePattern::str() const {
  static const char* names[3] = {"θ_12", "θ_13", "θ_23"};
  if (admissible.empty()) return "no admissible cocycle";
  std::string out;
  if (auto prod = as_product()) {
    for (std::size_t s = 0; s < 3; ++s) {
      if (s) out += ", ";
      out += names[s];
      const auto& v = (*prod)[s];
      if (v.size() == 1) {
        out += " = " + v.front().str();
      } else {
        out += " ∈ {";
        for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i].str();
        out += "}";
      }
    }
    return out;
  }
  for (std::size_t i = 0; i < admissible.size(); ++i) {
    if (i) out += "; ";
    out += "(";
    for (std::size_t s = 0; s < 3; ++s) out += (s ? ", " : "") + admissible[i][s].str();
    out += ")";
  }
  return "(θ_12, θ_13, θ_23) ∈ {" + out + "}";
}

// ---------------------------------------------------------------------------

std::vector<TorusElement> homogeneous_components(const FiniteAction& action, const ThetaMatrix& theta,
                                                 const TorusElement& x) {
  const auto& g = action.generator();
  const int n = g.order;
  std::vector<TorusElement> orbit;
  orbit.reserve(static_cast<std::size_t>(n));
  orbit.push_back(x);
  for (int j = 1; j < n; ++j) orbit.push_back(apply(g, theta, orbit.back()));
  std::vector<TorusElement> comps;
  const Rational inv_n = make_rational(1, n);
  for (int k = 0; k < n; ++k) {
    TorusElement xk(theta.dim());
    for (int j = 0; j < n; ++j)
      xk += orbit[static_cast<std::size_t>(j)] * PhasedScalar(Cyclotomic::root(n, -static_cast<long>(k) * j));
    xk *= PhasedScalar(inv_n);
    comps.push_back(xk.normalized(theta));
  }
  return comps;
}

FreenessWitness freeness_witness(const FiniteAction& action, const ThetaMatrix& theta) {
  const auto& g = action.generator();
  if (g.order == 1) return {true, std::nullopt};
  const int d = theta.dim();
  for (int i = 0; i < d; ++i) {
    const auto& img = g.images[static_cast<std::size_t>(i)];
    if (img.target != Monomial::unit(d, i)) continue;
    // unitary: u u* = 1
    const auto u = TorusElement::monomial(Monomial::unit(d, i));
    if (!(mul(theta, u, star(theta, u)) == TorusElement::one(d))) continue;
    if (img.coeff.terms().size() != 1 || img.coeff.terms().front().first != 0) continue;
    const auto& c = img.coeff.terms().front().second;
    const auto k = c.as_root_of_unity();
    if (!k) continue;
    const long m = c.field().order();
    const long ord = m / std::gcd(m, *k == 0 ? m : *k);
    if (ord == g.order) return {true, action.labels[static_cast<std::size_t>(i)]};
  }
  return {false, std::nullopt};
}

}  // namespace nbk
