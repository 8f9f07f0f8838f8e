#include "loglin/parser.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace loglin {

namespace {

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

struct Cursor {
  const std::string& s;
  std::size_t i = 0;
  int line;

  explicit Cursor(const std::string& text, int line_) : s(text), line(line_) {}

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line, msg); }

  void skip_ws() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool eof() {
    skip_ws();
    return i >= s.size();
  }
  char peek() {
    skip_ws();
    return i < s.size() ? s[i] : '\0';
  }
  bool try_consume(char c) {
    skip_ws();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "' " + what);
  }
  std::string ident() {
    skip_ws();
    if (i >= s.size() || !is_ident_start(s[i])) fail("expected an identifier");
    std::size_t b = i;
    while (i < s.size() && is_ident_char(s[i])) ++i;
    return s.substr(b, i - b);
  }
  std::string lower_ident(const char* what) {
    std::string id = ident();
    if (std::isupper(static_cast<unsigned char>(id[0])))
      fail("expected a lowercase " + std::string(what) + ", got '" + id + "'");
    return id;
  }
  std::string variable() {
    std::string id = ident();
    if (!std::isupper(static_cast<unsigned char>(id[0])))
      fail("expected a variable (uppercase), got '" + id + "'");
    return id;
  }
};

struct GoalBuilder {
  std::vector<std::string> var_names;
  std::unordered_map<std::string, int> var_ids;

  int var(const std::string& name) {
    auto it = var_ids.find(name);
    if (it != var_ids.end()) return it->second;
    int id = static_cast<int>(var_names.size());
    var_names.push_back(name);
    var_ids.emplace(name, id);
    return id;
  }
};

int resolve_type(Cursor& cur, const TypeHierarchy& h, const std::string& name) {
  int ty = h.id_of(name);
  if (ty < 0) cur.fail("unknown type '" + name + "'");
  return ty;
}

// Parses one conjunct. When `declare_into` is non-null (clause heads and
// bodies) unseen predicates are registered; queries require existing ones.
Conjunct parse_conjunct(Cursor& cur, const Program& p, Program* declare_into, GoalBuilder& gb) {
  cur.skip_ws();
  if (cur.i >= cur.s.size() || !is_ident_start(cur.s[cur.i])) cur.fail("expected a conjunct");
  std::string id = cur.ident();
  if (std::isupper(static_cast<unsigned char>(id[0]))) {
    cur.expect('=', "in constraint");
    std::string ty = cur.lower_ident("type name");
    return Constraint{gb.var(id), resolve_type(cur, p.types, ty)};
  }
  Atom a;
  if (cur.try_consume('(')) {
    a.args.push_back(gb.var(cur.variable()));
    while (cur.try_consume(',')) a.args.push_back(gb.var(cur.variable()));
    cur.expect(')', "to close the argument list");
  }
  int arity = static_cast<int>(a.args.size());
  auto it = p.pred_ids.find(id);
  if (it == p.pred_ids.end()) {
    if (!declare_into) cur.fail("unknown predicate '" + id + "'");
    a.pred = static_cast<int>(declare_into->preds.size());
    declare_into->preds.push_back({id, arity});
    declare_into->pred_ids.emplace(id, a.pred);
  } else {
    a.pred = it->second;
    if (p.preds[static_cast<std::size_t>(a.pred)].arity != arity)
      cur.fail("arity mismatch for predicate '" + id + "': declared " +
               std::to_string(p.preds[static_cast<std::size_t>(a.pred)].arity) + ", used with " +
               std::to_string(arity));
  }
  return a;
}

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool blank(const std::string& line) {
  for (char c : line)
    if (c != ' ' && c != '\t' && c != '\r') return false;
  return true;
}

}  // namespace

Program load_program(const std::string& text) {
  Program p;
  std::vector<std::pair<int, std::string>> clause_lines;

  // Pass 1: hierarchy declarations; clause lines are deferred until the
  // type table is complete.
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    if (blank(line)) continue;
    Cursor cur(line, lineno);
    cur.skip_ws();
    std::size_t mark = cur.i;
    std::string head = cur.ident();
    if (head == "subtype") {
      std::string sub = cur.lower_ident("type name");
      std::string super = cur.lower_ident("type name");
      cur.expect('.', "to end the declaration");
      if (!cur.eof()) cur.fail("trailing text after '.'");
      p.types.add_edge(sub, super);
    } else if (head == "type") {
      std::string name = cur.lower_ident("type name");
      cur.expect('.', "to end the declaration");
      if (!cur.eof()) cur.fail("trailing text after '.'");
      p.types.intern(name);
    } else {
      cur.i = mark;
      clause_lines.emplace_back(lineno, line);
    }
  }
  p.types.finalize();

  // Pass 2: clauses.
  for (auto& [ln, line] : clause_lines) {
    Cursor cur(line, ln);
    GoalBuilder gb;
    Conjunct head = parse_conjunct(cur, p, &p, gb);
    if (!std::holds_alternative<Atom>(head)) cur.fail("clause head must be an atom");
    Clause cl;
    cl.head = std::get<Atom>(head);
    cl.line = ln;
    if (cur.try_consume(':')) {
      cur.expect('-', "after ':' in ':-'");
      cl.body.push_back(parse_conjunct(cur, p, &p, gb));
      while (cur.try_consume(',')) cl.body.push_back(parse_conjunct(cur, p, &p, gb));
    }
    cur.expect('.', "to end the clause");
    if (!cur.eof()) cur.fail("trailing text after '.'");
    cl.var_count = gb.var_names.size();
    cl.var_names = std::move(gb.var_names);
    p.clauses.push_back(std::move(cl));
  }
  return p;
}

Goal parse_goal(const std::string& text, const Program& p, int line) {
  Cursor cur(text, line);
  if (cur.eof()) cur.fail("empty goal");
  GoalBuilder gb;
  Goal g;
  g.conjuncts.push_back(parse_conjunct(cur, p, nullptr, gb));
  while (cur.try_consume('&')) g.conjuncts.push_back(parse_conjunct(cur, p, nullptr, gb));
  if (!cur.eof()) cur.fail("trailing text after goal");
  g.var_names = std::move(gb.var_names);
  return g;
}

std::vector<CorpusEntry> load_corpus(const std::string& text, const Program& p) {
  std::vector<CorpusEntry> entries;
  std::map<std::string, std::size_t> by_key;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    if (blank(line)) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(lineno, "expected '<count><TAB><goal>'");
    std::string count_text = line.substr(0, tab);
    std::size_t b = count_text.find_first_not_of(' ');
    std::size_t e = count_text.find_last_not_of(' ');
    if (b == std::string::npos) throw ParseError(lineno, "missing token count");
    count_text = count_text.substr(b, e - b + 1);
    long count = 0;
    for (char c : count_text) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw ParseError(lineno, "token count must be a positive integer, got '" + count_text +
                                     "'");
      count = count * 10 + (c - '0');
    }
    if (count < 1) throw ParseError(lineno, "token count must be >= 1");

    Goal g = parse_goal(line.substr(tab + 1), p, lineno);
    std::string key = canonical_goal_key(g, p);
    auto it = by_key.find(key);
    if (it != by_key.end()) {
      entries[it->second].count += count;
    } else {
      by_key.emplace(key, entries.size());
      entries.push_back({std::move(g), count, lineno});
    }
  }
  return entries;
}

}  // namespace loglin
