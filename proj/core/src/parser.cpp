#include "evoter/parser.hpp"

#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "evoter/errors.hpp"

namespace evoter {

namespace {

struct Cursor {
  const std::string& line;
  int line_no;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(what, line_no, static_cast<int>(pos) + 1);
  }

  void skip_ws() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= line.size();
  }

  char peek() const { return pos < line.size() ? line[pos] : '\0'; }

  bool eat(char c) {
    skip_ws();
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool eat(const char* s) {
    skip_ws();
    std::size_t n = std::strlen(s);
    if (line.compare(pos, n, s) == 0) {
      pos += n;
      return true;
    }
    return false;
  }

  /// Feature-name token. ']' closes a pending '['; ')' is part of a name only
  /// while a '[' is unclosed — so interval names like "age[60-70)" lex whole,
  /// while "...0.40*age)" leaves the ')' to close a wrapped condition.
  std::string name() {
    skip_ws();
    std::size_t start = pos;
    if (pos >= line.size() || !std::isalpha(static_cast<unsigned char>(line[pos])))
      fail("expected a feature or action name");
    int open_brackets = 0;
    while (pos < line.size()) {
      char c = line[pos];
      bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                c == '/' || c == '-';
      if (c == '[') {
        ok = true;
        ++open_brackets;
      } else if (c == ']') {
        ok = open_brackets > 0;
        if (ok) --open_brackets;
      } else if (c == ')') {
        ok = open_brackets > 0;
      }
      if (!ok) break;
      ++pos;
    }
    return line.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    // scan the token by hand: a '.' belongs to the number only when a digit
    // follows, so range notes like "[0..192.0]" keep their '..' separator
    std::size_t p = pos;
    if (p < line.size() && (line[p] == '+' || line[p] == '-')) ++p;
    std::size_t digits_start = p;
    while (p < line.size() && std::isdigit(static_cast<unsigned char>(line[p]))) ++p;
    if (p + 1 < line.size() && line[p] == '.' &&
        std::isdigit(static_cast<unsigned char>(line[p + 1]))) {
      ++p;
      while (p < line.size() && std::isdigit(static_cast<unsigned char>(line[p]))) ++p;
    }
    if (p == digits_start) fail("expected a number");
    if (p < line.size() && (line[p] == 'e' || line[p] == 'E')) {
      std::size_t q = p + 1;
      if (q < line.size() && (line[q] == '+' || line[q] == '-')) ++q;
      std::size_t exp_start = q;
      while (q < line.size() && std::isdigit(static_cast<unsigned char>(line[q]))) ++q;
      if (q > exp_start) p = q;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + p, value);
    if (ec != std::errc() || ptr != line.data() + p) fail("expected a number");
    pos = p;
    // glued unit suffix like "mmHg" — figure texts carry them; discard
    while (pos < line.size() && std::isalpha(static_cast<unsigned char>(line[pos]))) ++pos;
    return value;
  }

  int integer(const char* what) {
    skip_ws();
    std::size_t start = pos;
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
    if (pos == start) fail(std::string("expected ") + what);
    return std::stoi(line.substr(start, pos - start));
  }
};

bool looks_like_coefficient(Cursor& cur) {
  // NUMBER '*' introduces a coefficient (or a certainty on the action side)
  std::size_t save = cur.pos;
  cur.skip_ws();
  std::size_t p = cur.pos;
  if (p < cur.line.size() && (cur.line[p] == '+' || cur.line[p] == '-')) ++p;
  bool digits = false;
  while (p < cur.line.size() &&
         (std::isdigit(static_cast<unsigned char>(cur.line[p])) || cur.line[p] == '.')) {
    digits = digits || std::isdigit(static_cast<unsigned char>(cur.line[p]));
    ++p;
  }
  bool result = digits && p < cur.line.size() && cur.line[p] == '*';
  cur.pos = save;
  return result;
}

Term parse_term(Cursor& cur, const FeatureSchema& schema) {
  double coeff = 1.0;
  if (looks_like_coefficient(cur)) {
    coeff = cur.number();
    if (!cur.eat('*')) cur.fail("expected '*' after coefficient");
  }
  if (!(coeff > 0.0) || coeff > 1.0) throw CoefficientOutOfRange(coeff);
  std::string feat = cur.name();
  int power = 1;
  if (cur.eat('^')) {
    power = cur.integer("a power digit");
    if (power < 1 || power > 3) cur.fail("power must be 1, 2 or 3");
  }
  int lag = 0;
  if (cur.eat('(')) {
    lag = cur.integer("a lag");
    if (!cur.eat(')')) cur.fail("expected ')' after lag");
    if (lag > schema.max_lag()) cur.fail("lag exceeds schema max_lag");
  }
  try {
    return Term::make(coeff, feat, power, lag, schema);
  } catch (const UnknownFeature&) {
    throw;
  }
}

bool starts_term(Cursor& cur) {
  cur.skip_ws();
  if (looks_like_coefficient(cur)) return true;
  return std::isalpha(static_cast<unsigned char>(cur.peek()));
}

Condition parse_condition(Cursor& cur, const FeatureSchema& schema) {
  bool wrapped = cur.eat('(');
  Condition cond;
  cond.leading = parse_term(cur, schema);

  cur.skip_ws();
  if (cur.eat("<=")) cond.op = CompareOp::LessEq;
  else if (cur.eat(">=")) cond.op = CompareOp::GreaterEq;
  else if (cur.eat('<')) cond.op = CompareOp::Less;
  else if (cur.eat('>')) cond.op = CompareOp::Greater;
  else cur.fail("expected comparison operator");

  if (starts_term(cur)) {
    cond.trailing = parse_term(cur, schema);
  } else {
    Constant c;
    c.value = cur.number();
    // optional range note "[min..max]" — regenerated from schema, so discarded
    cur.skip_ws();
    if (cur.peek() == '[') {
      cur.eat('[');
      cur.number();
      if (!cur.eat("..")) cur.fail("expected '..' in range note");
      cur.number();
      if (!cur.eat(']')) cur.fail("expected ']' closing range note");
    }
    const auto& spec = schema.feature(cond.leading.feature_index);
    c.range_min = spec.min;
    c.range_max = spec.max;
    cond.trailing = c;
  }

  if (wrapped && !cur.eat(')')) cur.fail("expected ')' closing condition");
  return cond;
}

Action parse_action(Cursor& cur, const FeatureSchema& schema) {
  Action a;
  if (looks_like_coefficient(cur)) {
    a.certainty = cur.number();
    if (!(a.certainty > 0.0) || a.certainty > 1.0) throw CoefficientOutOfRange(a.certainty);
    a.certainty = quantize_coefficient(a.certainty);
    cur.eat('*');
  }
  // action name runs to end of line (names like "NO FLAP" contain spaces)
  cur.skip_ws();
  std::string name = cur.line.substr(cur.pos);
  while (!name.empty() && (name.back() == ' ' || name.back() == '\t' || name.back() == '\r'))
    name.pop_back();
  if (name.empty()) cur.fail("expected an action name");
  if (!schema.has_action(name)) throw UnknownAction(name);
  cur.pos = cur.line.size();
  a.name = name;
  return a;
}

bool is_default_intro(Cursor& cur) {
  std::size_t save = cur.pos;
  cur.skip_ws();
  std::size_t p = cur.pos;
  std::string word;
  while (p < cur.line.size() && std::isalpha(static_cast<unsigned char>(cur.line[p])))
    word += static_cast<char>(std::tolower(static_cast<unsigned char>(cur.line[p++])));
  cur.pos = save;
  return word == "default";
}

}  // namespace

RuleSet parse(const std::string& text, const FeatureSchema& schema) {
  RuleSet rs;
  bool default_seen = false;

  std::istringstream stream(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(stream, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
      raw.pop_back();
    Cursor cur{raw, line_no};
    if (cur.at_end()) continue;
    if (default_seen) cur.fail("rules after the DEFAULT line");

    // optional rule number "N."
    cur.skip_ws();
    if (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
      std::size_t save = cur.pos;
      std::size_t p = cur.pos;
      while (p < raw.size() && std::isdigit(static_cast<unsigned char>(raw[p]))) ++p;
      if (p < raw.size() && raw[p] == '.' && (p + 1 >= raw.size() || !std::isdigit(static_cast<unsigned char>(raw[p + 1])))) {
        cur.pos = p + 1;
      } else {
        cur.pos = save;
      }
    }

    if (is_default_intro(cur)) {
      cur.name();  // "default"
      cur.skip_ws();
      if (std::isalpha(static_cast<unsigned char>(cur.peek()))) {
        std::size_t save = cur.pos;
        std::string word = cur.name();
        for (char& c : word) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (word != "action") cur.pos = save;
      }
      if (!cur.eat("->")) cur.fail("expected '->' after DEFAULT");
      rs.default_action = parse_action(cur, schema);
      default_seen = true;
      continue;
    }

    Rule rule;
    rule.conditions.push_back(parse_condition(cur, schema));
    while (cur.eat('&')) rule.conditions.push_back(parse_condition(cur, schema));
    if (!cur.eat("->")) cur.fail("expected '->' or '&' after condition");
    rule.action = parse_action(cur, schema);
    rs.rules.push_back(std::move(rule));
  }

  if (!default_seen) throw SyntaxError("missing DEFAULT line", line_no, 1);
  return rs;
}

RuleSet parse_file(const std::string& path, const FeatureSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), schema);
}

}  // namespace evoter
