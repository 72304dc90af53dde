#include "tnplan/pddl.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace tnplan {

std::string format_diagnostic(const ParseDiagnostic& d, std::string_view file) {
  std::ostringstream os;
  if (!file.empty()) os << file << ":";
  os << d.line << ":" << d.column << ": "
     << (d.severity == ParseDiagnostic::Severity::Error ? "error" : "warning") << ": " << d.message;
  return os.str();
}

namespace {

struct Node {
  bool list = false;
  std::string atom;
  std::vector<Node> items;
  int line = 0;
  int column = 0;

  bool is(std::string_view a) const { return !list && atom == a; }
  std::size_t size() const { return items.size(); }
  const Node& operator[](std::size_t i) const { return items[i]; }
  std::string_view head() const {
    return list && !items.empty() && !items[0].list ? std::string_view(items[0].atom) : std::string_view();
  }
};

struct Failure {
  ParseDiagnostic diag;
};

[[noreturn]] void fail(int line, int column, std::string msg) {
  throw Failure{{ParseDiagnostic::Severity::Error, line, column, std::move(msg)}};
}
[[noreturn]] void fail(const Node& at, std::string msg) { fail(at.line, at.column, std::move(msg)); }
[[noreturn]] void unsupported(const Node& at, const std::string& construct) {
  fail(at, "unsupported feature: " + construct);
}

Node read_sexpr(std::string_view text) {
  std::vector<Node> stack(1);
  stack[0].list = true;
  int line = 1, column = 1;
  std::size_t i = 0;
  auto advance = [&] {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    ++i;
  };
  while (i < text.size()) {
    char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance();
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
    } else if (c == '(') {
      Node n;
      n.list = true;
      n.line = line;
      n.column = column;
      stack.push_back(std::move(n));
      advance();
    } else if (c == ')') {
      if (stack.size() == 1) fail(line, column, "unbalanced ')'");
      Node done = std::move(stack.back());
      stack.pop_back();
      stack.back().items.push_back(std::move(done));
      advance();
    } else {
      Node n;
      n.line = line;
      n.column = column;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
             text[i] != ')' && text[i] != ';') {
        n.atom.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
        advance();
      }
      stack.back().items.push_back(std::move(n));
    }
  }
  if (stack.size() > 1) fail(stack.back(), "unclosed '('");
  if (stack[0].items.size() != 1 || !stack[0].items[0].list) fail(line, column, "expected a single (define ...) form");
  return std::move(stack[0].items[0]);
}

bool parse_number(const std::string& s, double& out) {
  if (s.empty()) return false;
  char c = s[0];
  bool numeric_start = std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
                       ((c == '-' || c == '+') && s.size() > 1 &&
                        (std::isdigit(static_cast<unsigned char>(s[1])) || s[1] == '.'));
  if (!numeric_start) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

std::string ground_name(std::string head, const std::vector<std::string>& args) {
  for (const auto& a : args) head += " " + a;
  std::replace(head.begin(), head.end(), '@', ' ');
  return head;
}

using TypedList = std::vector<std::pair<const Node*, std::string>>;

TypedList typed_list(const Node& list, std::size_t from) {
  TypedList out;
  std::size_t pending = 0;
  for (std::size_t i = from; i < list.size(); ++i) {
    const Node& item = list[i];
    if (item.is("-")) {
      if (i + 1 >= list.size()) fail(item, "missing type after '-'");
      const Node& type = list[++i];
      if (type.list) unsupported(type, "(either ...) types");
      for (std::size_t k = pending; k < out.size(); ++k) out[k].second = type.atom;
      pending = out.size();
      continue;
    }
    if (item.list) fail(item, "expected a name in typed list");
    out.push_back({&item, "object"});
  }
  return out;
}

struct Schema {
  std::string name;
  const Node* node = nullptr;
  bool instantaneous = false;
  std::vector<std::pair<std::string, std::string>> params;
  const Node* duration = nullptr;
  const Node* condition = nullptr;
  const Node* effect = nullptr;
};

struct Domain {
  std::string name;
  std::map<std::string, std::string> parent;
  bool typed = false;
  std::vector<std::pair<std::string, std::string>> constants;
  std::map<std::string, std::size_t> predicates;  // arity
  std::map<std::string, std::size_t> functions;
  std::vector<Schema> schemas;
};

const std::set<std::string> kAllowedRequirements = {":strips", ":durative-actions", ":fluents", ":typing",
                                                    ":duration-inequalities", ":continuous-effects"};

std::vector<std::pair<std::string, std::string>> parameters(const Node& list) {
  if (!list.list) fail(list, "expected parameter list");
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& [n, t] : typed_list(list, 0)) {
    if (n->atom.empty() || n->atom[0] != '?') fail(*n, "parameter names must start with '?'");
    out.push_back({n->atom, t});
  }
  return out;
}

Domain read_domain(const Node& root) {
  if (root.head() != "define" || root.size() < 2 || root[1].head() != "domain" || root[1].size() != 2)
    fail(root, "expected (define (domain <name>) ...)");
  Domain d;
  d.name = root[1][1].atom;
  for (std::size_t i = 2; i < root.size(); ++i) {
    const Node& sec = root[i];
    std::string_view key = sec.head();
    if (key == ":requirements") {
      for (std::size_t k = 1; k < sec.size(); ++k)
        if (!kAllowedRequirements.count(sec[k].atom)) unsupported(sec[k], "requirement " + sec[k].atom);
    } else if (key == ":types") {
      d.typed = true;
      for (auto& [n, t] : typed_list(sec, 1)) d.parent[n->atom] = t;
    } else if (key == ":constants") {
      for (auto& [n, t] : typed_list(sec, 1)) d.constants.push_back({n->atom, t});
    } else if (key == ":predicates") {
      for (std::size_t k = 1; k < sec.size(); ++k) {
        const Node& p = sec[k];
        if (p.head().empty()) fail(p, "expected predicate declaration");
        d.predicates[p[0].atom] = typed_list(p, 1).size();
      }
    } else if (key == ":functions") {
      for (std::size_t k = 1; k < sec.size(); ++k) {
        const Node& f = sec[k];
        if (f.is("-")) {
          if (k + 1 >= sec.size() || !sec[k + 1].is("number")) unsupported(f, "non-number function type");
          ++k;
          continue;
        }
        if (f.head().empty()) fail(f, "expected function declaration");
        d.functions[f[0].atom] = typed_list(f, 1).size();
      }
    } else if (key == ":durative-action" || key == ":action") {
      Schema s;
      s.node = &sec;
      s.instantaneous = key == ":action";
      if (sec.size() < 2 || sec[1].list) fail(sec, "action needs a name");
      s.name = sec[1].atom;
      for (std::size_t k = 2; k < sec.size(); k += 2) {
        const Node& field = sec[k];
        if (k + 1 >= sec.size()) fail(field, "missing value for " + field.atom);
        const Node* value = &sec[k + 1];
        if (field.is(":parameters")) s.params = parameters(*value);
        else if (field.is(":duration") && !s.instantaneous) s.duration = value;
        else if (field.is(":condition") && !s.instantaneous) s.condition = value;
        else if (field.is(":precondition") && s.instantaneous) s.condition = value;
        else if (field.is(":effect")) s.effect = value;
        else fail(field, "unexpected field " + field.atom + " in " + s.name);
      }
      if (!s.instantaneous && !s.duration) fail(sec, "durative action " + s.name + " has no :duration");
      d.schemas.push_back(std::move(s));
    } else if (key == ":derived") {
      unsupported(sec, "derived predicates");
    } else {
      fail(sec, "unknown domain section " + std::string(key));
    }
  }
  return d;
}

struct GExpr {
  std::map<std::string, double> coef;
  double constant = 0.0;

  bool is_constant() const { return coef.empty(); }
  GExpr& add(const GExpr& o, double scale) {
    for (auto& [k, w] : o.coef) coef[k] += scale * w;
    constant += scale * o.constant;
    std::erase_if(coef, [](const auto& kv) { return kv.second == 0.0; });
    return *this;
  }
  GExpr& scale(double s) {
    for (auto& [k, w] : coef) w *= s;
    constant *= s;
    if (s == 0.0) coef.clear();
    return *this;
  }
};

struct GCond {
  GExpr lhs;  // lhs <cmp> 0
  Cmp cmp = Cmp::LessEq;
};

struct GConds {
  std::vector<std::string> props;
  std::vector<GCond> numeric;
};

struct GEffect {
  std::string target;
  EffectMode mode = EffectMode::Assign;
  GExpr expr;
};

struct GEffects {
  std::vector<std::string> add, del;
  std::vector<GEffect> numeric;
};

struct GRate {
  std::string target;
  RateMode mode = RateMode::Increase;
  GExpr rate;
};

struct GDur {
  Cmp cmp = Cmp::Eq;
  GExpr value;
};

struct GAction {
  std::string name;
  const Node* at = nullptr;
  bool instantaneous = false;
  std::vector<GDur> duration;
  GConds pre_start, invariants, pre_end;
  GEffects eff_start, eff_end;
  std::vector<GRate> rates;
  bool pruned = false;
};

// Thrown while grounding one binding whose static conditions fail or whose
// static fluents are undefined.
struct Pruned {};

bool comparator(std::string_view s, Cmp& out) {
  if (s == "<") out = Cmp::Less;
  else if (s == "<=") out = Cmp::LessEq;
  else if (s == "=") out = Cmp::Eq;
  else if (s == ">=") out = Cmp::GreaterEq;
  else if (s == ">") out = Cmp::Greater;
  else return false;
  return true;
}

bool mentions_atom(const Node& n, std::string_view atom) {
  if (!n.list) return n.atom == atom;
  return std::any_of(n.items.begin(), n.items.end(), [&](const Node& c) { return mentions_atom(c, atom); });
}

bool holds(double lhs, Cmp cmp) {
  LinearCondition c{{{1.0, 0}}, cmp, 0.0};
  double v[1] = {lhs};
  return evaluate_condition(c, v);
}

class Grounder {
 public:
  explicit Grounder(const Domain& d) : d_(d) { find_changed(); }

  void read_problem(const Node& root) {
    if (root.head() != "define" || root.size() < 2 || root[1].head() != "problem" || root[1].size() != 2)
      fail(root, "expected (define (problem <name>) ...)");
    problem_name = root[1][1].atom;
    for (auto& [n, t] : d_.constants) declare_object(n, t, root);
    for (std::size_t i = 2; i < root.size(); ++i) {
      const Node& sec = root[i];
      std::string_view key = sec.head();
      if (key == ":domain") {
        if (sec.size() != 2 || sec[1].atom != d_.name) fail(sec, "problem refers to a different domain");
      } else if (key == ":objects") {
        for (auto& [n, t] : typed_list(sec, 1)) declare_object(n->atom, t, *n);
      } else if (key == ":init") {
        for (std::size_t k = 1; k < sec.size(); ++k) init_fact(sec[k]);
      } else if (key == ":goal") {
        if (sec.size() != 2) fail(sec, "expected a single goal condition");
        goal_node_ = &sec[1];
      } else if (key == ":metric") {
        unsupported(sec, "metric optimization");
      } else if (key == ":constraints") {
        unsupported(sec, "trajectory constraints");
      } else {
        fail(sec, "unknown problem section " + std::string(key));
      }
    }
    root_ = &root;
  }

  Problem ground() {
    for (const auto& s : d_.schemas) ground_schema(s);
    binding_.clear();
    GConds goal;
    if (goal_node_) {
      goal_mode_ = true;
      try {
        condition(*goal_node_, goal);
      } catch (const Pruned&) {
        fail(*goal_node_, "goal refers to a fluent without a value");
      }
      goal_mode_ = false;
    }
    fixpoint(goal);
    return assemble(goal);
  }

  std::string problem_name;

 private:
  void find_changed() {
    for (const auto& s : d_.schemas)
      if (s.effect) scan_effect(*s.effect);
  }

  void scan_effect(const Node& n) {
    std::string_view h = n.head();
    if (h == "and") {
      for (std::size_t i = 1; i < n.size(); ++i) scan_effect(n[i]);
    } else if (h == "at" && n.size() == 3) {
      scan_effect(n[2]);
    } else if (h == "not" && n.size() == 2) {
      changed_preds_.insert(std::string(n[1].head()));
    } else if (h == "assign" || h == "increase" || h == "decrease" || h == "scale-up" || h == "scale-down") {
      if (n.size() == 3) changed_funcs_.insert(std::string(n[1].head()));
    } else if (!h.empty()) {
      changed_preds_.insert(std::string(h));
    }
  }

  bool is_subtype(std::string t, const std::string& want) const {
    for (int guard = 0; guard < 64; ++guard) {
      if (t == want) return true;
      if (t == "object") return false;
      auto it = d_.parent.find(t);
      if (it == d_.parent.end()) return false;
      t = it->second;
    }
    return false;
  }

  void declare_object(const std::string& name, const std::string& type, const Node& at) {
    if (d_.typed && type != "object" && !d_.parent.count(type)) fail(at, "undeclared type " + type);
    if (object_type_.count(name)) return;
    object_type_[name] = type;
    objects_.push_back(name);
  }

  std::string resolve(const Node& arg) {
    if (arg.list) fail(arg, "expected an object or parameter");
    if (!arg.atom.empty() && arg.atom[0] == '?') {
      auto it = binding_.find(arg.atom);
      if (it == binding_.end()) fail(arg, "undeclared parameter " + arg.atom);
      return it->second;
    }
    if (!object_type_.count(arg.atom)) fail(arg, "undeclared object " + arg.atom);
    return arg.atom;
  }

  std::string atom_name(const Node& n, const std::map<std::string, std::size_t>& table, const char* what) {
    std::string head(n.head());
    auto it = table.find(head);
    if (it == table.end()) fail(n, std::string("undeclared ") + what + " " + (head.empty() ? "<list>" : head));
    if (n.size() - 1 != it->second) fail(n, std::string("wrong number of arguments for ") + what + " " + head);
    std::vector<std::string> args;
    for (std::size_t i = 1; i < n.size(); ++i) args.push_back(resolve(n[i]));
    return ground_name(head, args);
  }

  void init_fact(const Node& n) {
    if (n.head() == "at" && n.size() == 3 && !n[1].list) unsupported(n, "timed initial literals");
    if (n.head() == "=") {
      if (n.size() != 3 || !n[1].list) fail(n, "expected (= (<function> ...) <number>)");
      std::string f = atom_name(n[1], d_.functions, "function");
      double v;
      if (n[2].list || !parse_number(n[2].atom, v)) fail(n[2], "initial fluent value must be a number");
      if (!values_.emplace(f, v).second) fail(n, "fluent " + f + " assigned twice in the initial state");
      return;
    }
    if (n.head() == "not") unsupported(n, "negative initial literal");
    facts_.insert(atom_name(n, d_.predicates, "predicate"));
  }

  GExpr fluent(const Node& n) {
    std::string name = atom_name(n, d_.functions, "function");
    GExpr e;
    if (!changed_funcs_.count(std::string(n.head()))) {
      auto it = values_.find(name);
      if (it == values_.end()) throw Pruned{};
      e.constant = it->second;
    } else {
      e.coef[name] = 1.0;
    }
    return e;
  }

  GExpr expr(const Node& n) {
    GExpr e;
    if (!n.list) {
      if (n.atom == "#t") unsupported(n, "#t outside a continuous effect");
      if (n.atom == "?duration") unsupported(n, "?duration outside the duration constraint");
      if (!parse_number(n.atom, e.constant)) fail(n, "expected a numeric expression, got " + n.atom);
      return e;
    }
    std::string_view h = n.head();
    if (h == "+") {
      for (std::size_t i = 1; i < n.size(); ++i) e.add(expr(n[i]), 1.0);
      return e;
    }
    if (h == "-") {
      if (n.size() == 2) return expr(n[1]).scale(-1.0);
      if (n.size() != 3) fail(n, "'-' takes one or two arguments");
      return expr(n[1]).add(expr(n[2]), -1.0);
    }
    if (h == "*") {
      if (n.size() < 2) fail(n, "'*' needs arguments");
      e = expr(n[1]);
      for (std::size_t i = 2; i < n.size(); ++i) {
        GExpr r = expr(n[i]);
        if (!e.is_constant() && !r.is_constant()) unsupported(n, "non-linear expression");
        if (e.is_constant()) std::swap(e, r);
        e.scale(r.constant);
      }
      return e;
    }
    if (h == "/") {
      if (n.size() != 3) fail(n, "'/' takes two arguments");
      GExpr den = expr(n[2]);
      if (!den.is_constant()) unsupported(n, "division by a changing fluent");
      if (den.constant == 0.0) fail(n, "division by zero");
      return expr(n[1]).scale(1.0 / den.constant);
    }
    if (h == "^" || h == "sqrt" || h == "exp" || h == "abs" || h == "min" || h == "max" || h == "log")
      unsupported(n, "operator " + std::string(h));
    if (h.empty()) fail(n, "expected a numeric expression");
    return fluent(n);
  }

  void condition(const Node& n, GConds& out) {
    std::string_view h = n.head();
    if (!n.list || h.empty()) fail(n, "expected a condition");
    Cmp cmp;
    if (h == "and") {
      for (std::size_t i = 1; i < n.size(); ++i) condition(n[i], out);
    } else if (h == "not") {
      unsupported(n, "negative conditions");
    } else if (h == "or" || h == "imply" || h == "exists" || h == "forall" || h == "when") {
      unsupported(n, "(" + std::string(h) + " ...) conditions");
    } else if (comparator(h, cmp)) {
      if (n.size() != 3) fail(n, "comparison takes two arguments");
      if (mentions_atom(n, "?duration")) unsupported(n, "duration-dependent conditions");
      if (mentions_atom(n, "#t")) unsupported(n, "#t in a condition");
      GCond c;
      c.lhs = expr(n[1]).add(expr(n[2]), -1.0);
      c.cmp = cmp;
      out.numeric.push_back(std::move(c));
    } else if (h == "at" || h == "over") {
      fail(n, "temporal qualifier not allowed here");
    } else {
      std::string name = atom_name(n, d_.predicates, "predicate");
      if (changed_preds_.count(std::string(h))) {
        out.props.push_back(name);
      } else if (!facts_.count(name)) {
        if (!goal_mode_) throw Pruned{};
        out.props.push_back(name);
      }
    }
  }

  void timed_condition(const Node& n, GAction& a) {
    std::string_view h = n.head();
    if (h == "and") {
      for (std::size_t i = 1; i < n.size(); ++i) timed_condition(n[i], a);
    } else if (h == "at" && n.size() == 3 && n[1].is("start")) {
      condition(n[2], a.pre_start);
    } else if (h == "at" && n.size() == 3 && n[1].is("end")) {
      condition(n[2], a.pre_end);
    } else if (h == "over" && n.size() == 3 && n[1].is("all")) {
      condition(n[2], a.invariants);
    } else {
      fail(n, "expected (at start ...), (at end ...) or (over all ...)");
    }
  }

  void effect(const Node& n, GEffects& out) {
    std::string_view h = n.head();
    if (!n.list || h.empty()) fail(n, "expected an effect");
    if (h == "and") {
      for (std::size_t i = 1; i < n.size(); ++i) effect(n[i], out);
    } else if (h == "not") {
      if (n.size() != 2) fail(n, "(not ...) takes one atom");
      out.del.push_back(atom_name(n[1], d_.predicates, "predicate"));
    } else if (h == "assign" || h == "increase" || h == "decrease") {
      if (n.size() != 3) fail(n, std::string(h) + " takes a fluent and an expression");
      if (mentions_atom(n[2], "#t")) unsupported(n, "continuous effect inside at start/at end");
      if (mentions_atom(n[2], "?duration")) unsupported(n, "duration-dependent effects");
      GEffect e;
      e.target = atom_name(n[1], d_.functions, "function");
      e.mode = h == "assign" ? EffectMode::Assign : h == "increase" ? EffectMode::Increase : EffectMode::Decrease;
      e.expr = expr(n[2]);
      out.numeric.push_back(std::move(e));
    } else if (h == "scale-up" || h == "scale-down" || h == "when" || h == "forall") {
      unsupported(n, "(" + std::string(h) + " ...) effects");
    } else {
      out.add.push_back(atom_name(n, d_.predicates, "predicate"));
    }
  }

  void continuous(const Node& n, GAction& a) {
    const Node& rate = n[2];
    GRate r;
    r.target = atom_name(n[1], d_.functions, "function");
    r.mode = n.head() == "increase" ? RateMode::Increase : RateMode::Decrease;
    if (rate.is("#t")) {
      r.rate.constant = 1.0;
    } else if (rate.head() == "*" && rate.size() == 3 && (rate[1].is("#t") != rate[2].is("#t"))) {
      const Node& other = rate[1].is("#t") ? rate[2] : rate[1];
      if (mentions_atom(other, "#t")) unsupported(rate, "non-linear continuous effect");
      r.rate = expr(other);
    } else {
      unsupported(rate, "non-linear continuous effect");
    }
    a.rates.push_back(std::move(r));
  }

  void timed_effect(const Node& n, GAction& a) {
    std::string_view h = n.head();
    if (h == "and") {
      for (std::size_t i = 1; i < n.size(); ++i) timed_effect(n[i], a);
    } else if (h == "at" && n.size() == 3 && n[1].is("start")) {
      effect(n[2], a.eff_start);
    } else if (h == "at" && n.size() == 3 && n[1].is("end")) {
      effect(n[2], a.eff_end);
    } else if ((h == "increase" || h == "decrease") && n.size() == 3 && mentions_atom(n[2], "#t")) {
      continuous(n, a);
    } else if (h == "when" || h == "forall") {
      unsupported(n, "(" + std::string(h) + " ...) effects");
    } else {
      fail(n, "effect needs (at start ...) or (at end ...)");
    }
  }

  void duration(const Node& n, GAction& a) {
    std::string_view h = n.head();
    Cmp cmp;
    if (h == "and") {
      for (std::size_t i = 1; i < n.size(); ++i) duration(n[i], a);
    } else if (comparator(h, cmp) && n.size() == 3 && n[1].is("?duration")) {
      if (mentions_atom(n[2], "?duration")) fail(n, "?duration on both sides");
      a.duration.push_back({cmp, expr(n[2])});
    } else if (h == "at") {
      unsupported(n, "duration constraints at start/at end");
    } else {
      fail(n, "expected (<cmp> ?duration <expr>)");
    }
  }

  void collect_static_atoms(const Node& n, std::vector<const Node*>& out) const {
    std::string_view h = n.head();
    if (h == "and") {
      for (std::size_t i = 1; i < n.size(); ++i) collect_static_atoms(n[i], out);
    } else if ((h == "at" || h == "over") && n.size() == 3) {
      collect_static_atoms(n[2], out);
    } else if (d_.predicates.count(std::string(h)) && !changed_preds_.count(std::string(h))) {
      out.push_back(&n);
    }
  }

  void ground_schema(const Schema& s) {
    std::vector<std::vector<std::string>> domains;
    for (auto& [p, t] : s.params) {
      if (d_.typed && t != "object" && !d_.parent.count(t)) fail(*s.node, "undeclared type " + t);
      std::vector<std::string> objs;
      for (const auto& o : objects_)
        if (is_subtype(object_type_.at(o), t)) objs.push_back(o);
      domains.push_back(std::move(objs));
    }
    // Static atoms are checked as soon as their last parameter is bound.
    std::vector<std::vector<const Node*>> checks(s.params.size() + 1);
    if (s.condition) {
      std::vector<const Node*> atoms;
      collect_static_atoms(*s.condition, atoms);
      for (const Node* a : atoms) {
        std::size_t last = 0;
        for (std::size_t i = 1; i < a->size(); ++i)
          for (std::size_t p = 0; p < s.params.size(); ++p)
            if ((*a)[i].is(s.params[p].first)) last = std::max(last, p + 1);
        checks[last].push_back(a);
      }
    }
    binding_.clear();
    auto passes = [&](std::size_t level) {
      for (const Node* a : checks[level])
        if (!facts_.count(atom_name(*a, d_.predicates, "predicate"))) return false;
      return true;
    };
    if (!passes(0)) return;
    std::vector<std::string> args;
    auto rec = [&](auto&& self, std::size_t k) -> void {
      if (k == s.params.size()) {
        instantiate(s, args);
        return;
      }
      for (const auto& o : domains[k]) {
        binding_[s.params[k].first] = o;
        args.push_back(o);
        if (passes(k + 1)) self(self, k + 1);
        args.pop_back();
      }
      binding_.erase(s.params[k].first);
    };
    rec(rec, 0);
  }

  void instantiate(const Schema& s, const std::vector<std::string>& args) {
    GAction a;
    a.name = ground_name(s.name, args);
    a.at = s.node;
    a.instantaneous = s.instantaneous;
    try {
      if (s.duration) duration(*s.duration, a);
      if (s.condition) {
        if (s.instantaneous) condition(*s.condition, a.pre_start);
        else timed_condition(*s.condition, a);
      }
      if (s.effect) {
        if (s.instantaneous) effect(*s.effect, a.eff_start);
        else timed_effect(*s.effect, a);
      }
    } catch (const Pruned&) {
      return;
    }
    actions_.push_back(std::move(a));
  }

  // Folds fluents no remaining action changes; returns false when one is undefined.
  bool fold(GExpr& e, const std::set<std::string>& targeted) const {
    for (auto it = e.coef.begin(); it != e.coef.end();) {
      if (targeted.count(it->first)) {
        ++it;
        continue;
      }
      auto v = values_.find(it->first);
      if (v == values_.end()) return false;
      e.constant += it->second * v->second;
      it = e.coef.erase(it);
    }
    return true;
  }

  // Returns false when a condition is statically false or undefined.
  bool simplify(GConds& c, const std::set<std::string>& changing, const std::set<std::string>& targeted,
                bool keep_false) const {
    std::vector<std::string> props;
    for (auto& p : c.props) {
      if (changing.count(p)) props.push_back(p);
      else if (!facts_.count(p)) {
        if (!keep_false) return false;
        props.push_back(p);
      }
    }
    c.props = std::move(props);
    std::vector<GCond> numeric;
    for (auto& n : c.numeric) {
      if (!fold(n.lhs, targeted)) return false;
      if (!n.lhs.is_constant()) numeric.push_back(std::move(n));
      else if (!holds(n.lhs.constant, n.cmp)) return false;
    }
    c.numeric = std::move(numeric);
    return true;
  }

  void fixpoint(GConds& goal) {
    for (bool again = true; again;) {
      again = false;
      std::set<std::string> changing, targeted;
      for (const auto& a : actions_) {
        if (a.pruned) continue;
        for (const auto* e : {&a.eff_start, &a.eff_end}) {
          changing.insert(e->add.begin(), e->add.end());
          changing.insert(e->del.begin(), e->del.end());
          for (const auto& n : e->numeric) targeted.insert(n.target);
        }
        for (const auto& r : a.rates) targeted.insert(r.target);
      }
      for (auto& a : actions_) {
        if (a.pruned) continue;
        bool ok = simplify(a.pre_start, changing, targeted, false) &&
                  simplify(a.invariants, changing, targeted, false) &&
                  simplify(a.pre_end, changing, targeted, false);
        for (auto* e : {&a.eff_start, &a.eff_end})
          for (auto& n : e->numeric) ok = ok && fold(n.expr, targeted);
        for (auto& r : a.rates) ok = ok && fold(r.rate, targeted);
        for (auto& d : a.duration) ok = ok && fold(d.value, targeted);
        if (!ok) {
          a.pruned = true;
          again = true;
        }
      }
      if (!again) {
        if (!simplify(goal, changing, targeted, true)) {
          const Node& at = goal_node_ ? *goal_node_ : *root_;
          fail(at, "goal has a numeric condition that is constant and false, or refers to an undefined fluent");
        }
      }
    }
  }

  Problem assemble(const GConds& goal) {
    std::set<std::string> props(goal.props.begin(), goal.props.end()), vars;
    auto note_expr = [&](const GExpr& e) {
      for (auto& [k, w] : e.coef) vars.insert(k);
    };
    auto note_conds = [&](const GConds& c) {
      props.insert(c.props.begin(), c.props.end());
      for (const auto& n : c.numeric) note_expr(n.lhs);
    };
    auto note_effects = [&](const GEffects& e) {
      props.insert(e.add.begin(), e.add.end());
      props.insert(e.del.begin(), e.del.end());
      for (const auto& n : e.numeric) {
        vars.insert(n.target);
        note_expr(n.expr);
      }
    };
    note_conds(goal);
    for (const auto& a : actions_) {
      if (a.pruned) continue;
      note_conds(a.pre_start);
      note_conds(a.invariants);
      note_conds(a.pre_end);
      note_effects(a.eff_start);
      note_effects(a.eff_end);
      for (const auto& r : a.rates) vars.insert(r.target);
    }
    std::vector<std::string> prop_names(props.begin(), props.end()), var_names(vars.begin(), vars.end());
    auto pid = [&](const std::string& p) {
      return static_cast<PropId>(std::lower_bound(prop_names.begin(), prop_names.end(), p) - prop_names.begin());
    };
    auto vid = [&](const std::string& v) {
      return static_cast<VarId>(std::lower_bound(var_names.begin(), var_names.end(), v) - var_names.begin());
    };
    auto ids = [&](const std::vector<std::string>& names) {
      std::vector<PropId> out;
      for (const auto& n : names) out.push_back(pid(n));
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      return out;
    };
    auto terms = [&](const GExpr& e) {
      std::vector<Term> out;
      for (auto& [k, w] : e.coef) out.push_back({w, vid(k)});
      return out;
    };
    auto conds = [&](const GConds& c) {
      ConditionSet out;
      out.propositions = ids(c.props);
      for (const auto& n : c.numeric) out.numeric.push_back({terms(n.lhs), n.cmp, -n.lhs.constant});
      return out;
    };
    auto effects = [&](const GEffects& e) {
      EffectSet out;
      out.add = ids(e.add);
      out.del = ids(e.del);
      // A proposition both deleted and added ends up true.
      std::erase_if(out.del, [&](PropId p) { return std::binary_search(out.add.begin(), out.add.end(), p); });
      for (const auto& n : e.numeric) out.numeric.push_back({vid(n.target), n.mode, {terms(n.expr), n.expr.constant}});
      return out;
    };

    std::vector<DurativeAction> actions;
    for (const auto& a : actions_) {
      if (a.pruned) continue;
      DurativeAction da;
      da.name = a.name;
      da.instantaneous = a.instantaneous;
      for (const auto& d : a.duration) {
        if (!d.value.is_constant()) unsupported(*a.at, "duration of " + a.name + " depends on a changing fluent");
        da.duration.push_back({d.cmp, d.value.constant});
      }
      da.pre_start = conds(a.pre_start);
      da.invariants = conds(a.invariants);
      da.pre_end = conds(a.pre_end);
      da.eff_start = effects(a.eff_start);
      da.eff_end = effects(a.eff_end);
      for (const auto& r : a.rates) {
        if (!r.rate.is_constant()) unsupported(*a.at, "rate of " + a.name + " depends on a changing fluent");
        da.continuous.push_back({vid(r.target), r.mode, r.rate.constant});
      }
      actions.push_back(std::move(da));
    }

    InitialState init;
    for (const auto& f : facts_)
      if (props.count(f)) init.true_propositions.push_back(pid(f));
    std::sort(init.true_propositions.begin(), init.true_propositions.end());
    for (const auto& v : var_names) {
      auto it = values_.find(v);
      if (it == values_.end()) fail(*root_, "fluent " + v + " has no initial value");
      init.assignments.push_back(it->second);
    }
    Goal g;
    g.propositions = ids(goal.props);
    for (const auto& n : goal.numeric) g.numeric_conditions.push_back({terms(n.lhs), n.cmp, -n.lhs.constant});
    try {
      return Problem(std::move(prop_names), std::move(var_names), std::move(actions), std::move(init), std::move(g));
    } catch (const ModelError& e) {
      fail(*root_, e.what());
    }
  }

  const Domain& d_;
  std::set<std::string> changed_preds_, changed_funcs_;
  std::map<std::string, std::string> object_type_;
  std::vector<std::string> objects_;
  std::set<std::string> facts_;
  std::map<std::string, double> values_;
  std::map<std::string, std::string> binding_;
  std::vector<GAction> actions_;
  const Node* goal_node_ = nullptr;
  const Node* root_ = nullptr;
  bool goal_mode_ = false;
};

}  // namespace

ParseResult parse_domain_and_problem(std::string_view domain_text, std::string_view problem_text) {
  ParseResult result;
  Node droot, proot;
  bool in_domain = true;
  try {
    droot = read_sexpr(domain_text);
    Domain d = read_domain(droot);
    result.domain_name = d.name;
    in_domain = false;
    proot = read_sexpr(problem_text);
    Grounder g(d);
    g.read_problem(proot);
    result.problem_name = g.problem_name;
    result.problem = g.ground();
  } catch (Failure& f) {
    f.diag.message = std::string(in_domain ? "domain: " : "problem: ") + f.diag.message;
    result.diagnostics.push_back(std::move(f.diag));
  }
  return result;
}

std::string write_plan(const Plan& plan) {
  std::vector<PlanStep> steps = plan.steps;
  std::stable_sort(steps.begin(), steps.end(), [](const PlanStep& a, const PlanStep& b) { return a.time < b.time; });
  std::string out;
  char buf[64];
  for (const auto& s : steps) {
    std::snprintf(buf, sizeof buf, "%.6f: ", s.time);
    out += buf;
    out += "(" + s.action + ")";
    if (!s.instantaneous) {
      std::snprintf(buf, sizeof buf, " [%.6f]", s.duration);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

PlanReadResult read_plan(std::string_view text) {
  static const std::regex line_re(
      R"(^\s*([-+0-9.eE]+)\s*:\s*\(\s*([^()]*?)\s*\)\s*(\[\s*([-+0-9.eE]+)\s*\])?\s*(;.*)?$)");
  PlanReadResult result;
  Plan plan;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == ';') continue;
    std::smatch m;
    double time = 0, dur = 0;
    if (!std::regex_match(line, m, line_re) || !parse_number(m[1].str(), time) ||
        (m[3].matched && !parse_number(m[4].str(), dur))) {
      result.diagnostics.push_back({ParseDiagnostic::Severity::Error, number, 1, "malformed plan line: " + line});
      return result;
    }
    PlanStep step;
    std::istringstream words(m[2].str());
    std::string w;
    while (words >> w) {
      std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
      step.action += (step.action.empty() ? "" : " ") + w;
    }
    step.time = time;
    step.duration = dur;
    step.instantaneous = !m[3].matched;
    plan.steps.push_back(std::move(step));
  }
  result.plan = std::move(plan);
  return result;
}

namespace {

std::string mangle(std::string name) {
  std::replace(name.begin(), name.end(), ' ', '@');
  return name;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sum(const std::vector<Term>& terms, double constant, const Problem& p) {
  std::string s = "(+";
  for (const auto& t : terms) s += " (* " + num(t.weight) + " (" + mangle(p.variables()[t.var]) + "))";
  return s + " " + num(constant) + ")";
}

std::string numeric_condition(const LinearCondition& c, const Problem& p) {
  return std::string("(") + to_string(c.cmp) + " " + sum(c.terms, 0.0, p) + " " + num(c.constant) + ")";
}

std::string conditions(const ConditionSet& c, const Problem& p, const char* wrap) {
  std::string s;
  auto emit = [&](const std::string& inner) {
    s += wrap ? std::string(" (") + wrap + " " + inner + ")" : " " + inner;
  };
  for (PropId id : c.propositions) emit("(" + mangle(p.propositions()[id]) + ")");
  for (const auto& n : c.numeric) emit(numeric_condition(n, p));
  return s;
}

std::string effects(const EffectSet& e, const Problem& p, const char* wrap) {
  std::string s;
  auto emit = [&](const std::string& inner) {
    s += wrap ? std::string(" (") + wrap + " " + inner + ")" : " " + inner;
  };
  for (PropId id : e.add) emit("(" + mangle(p.propositions()[id]) + ")");
  for (PropId id : e.del) emit("(not (" + mangle(p.propositions()[id]) + "))");
  for (const auto& n : e.numeric) {
    const char* op = n.mode == EffectMode::Assign ? "assign" : n.mode == EffectMode::Increase ? "increase" : "decrease";
    emit(std::string("(") + op + " (" + mangle(p.variables()[n.target]) + ") " +
         sum(n.expression.terms, n.expression.constant, p) + ")");
  }
  return s;
}

}  // namespace

std::string write_ground_domain(const Problem& problem, std::string_view name) {
  std::ostringstream os;
  os << "(define (domain " << name << ")\n";
  os << "  (:requirements :durative-actions :fluents :duration-inequalities :continuous-effects)\n";
  os << "  (:predicates";
  for (const auto& p : problem.propositions()) os << " (" << mangle(p) << ")";
  os << ")\n  (:functions";
  for (const auto& v : problem.variables()) os << " (" << mangle(v) << ")";
  os << ")\n";
  for (const auto& a : problem.actions()) {
    if (a.instantaneous) {
      os << "  (:action " << mangle(a.name) << "\n    :parameters ()\n";
      os << "    :precondition (and" << conditions(a.pre_start, problem, nullptr) << ")\n";
      os << "    :effect (and" << effects(a.eff_start, problem, nullptr) << "))\n";
      continue;
    }
    os << "  (:durative-action " << mangle(a.name) << "\n    :parameters ()\n    :duration (and";
    for (const auto& d : a.duration) os << " (" << to_string(d.cmp) << " ?duration " << num(d.value) << ")";
    os << ")\n    :condition (and" << conditions(a.pre_start, problem, "at start")
       << conditions(a.invariants, problem, "over all") << conditions(a.pre_end, problem, "at end") << ")\n";
    os << "    :effect (and" << effects(a.eff_start, problem, "at start") << effects(a.eff_end, problem, "at end");
    for (const auto& c : a.continuous)
      os << " (" << (c.mode == RateMode::Decrease ? "decrease" : "increase") << " (" << mangle(problem.variables()[c.target])
         << ") (* #t " << num(c.rate) << "))";
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string write_ground_problem(const Problem& problem, std::string_view name, std::string_view domain) {
  std::ostringstream os;
  os << "(define (problem " << name << ") (:domain " << domain << ")\n  (:init";
  for (PropId p : problem.initial().true_propositions) os << " (" << mangle(problem.propositions()[p]) << ")";
  for (int v = 0; v < problem.num_variables(); ++v)
    os << " (= (" << mangle(problem.variables()[v]) << ") " << num(problem.initial().assignments[v]) << ")";
  os << ")\n  (:goal (and";
  for (PropId p : problem.goal().propositions) os << " (" << mangle(problem.propositions()[p]) << ")";
  for (const auto& c : problem.goal().numeric_conditions) os << " " << numeric_condition(c, problem);
  os << ")))\n";
  return os.str();
}

}  // namespace tnplan
