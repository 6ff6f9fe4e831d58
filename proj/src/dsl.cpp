#include "iconforge/dsl.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <map>
#include <set>
#include <sstream>

#include "iconforge/errors.hpp"
#include "iconforge/scene.hpp"

namespace iconforge::dsl {

namespace {

using S = Sort;

const std::vector<OpInfo>& op_table() {
  static const std::vector<OpInfo> table = {
      {Op::Equal, "equal", S::Violation, {S::Number, S::Number}},
      {Op::Smaller, "smaller", S::Violation, {S::Number, S::Number}},
      {Op::Larger, "larger", S::Violation, {S::Number, S::Number}},
      {Op::CoincideOnPoint, "coincide_on_point", S::Violation, {S::Segment, S::Point, S::Segment, S::Point}},
      {Op::Inside, "inside", S::Violation, {S::Segment, S::Segment}},
      {Op::Touch, "touch", S::Violation, {S::Segment, S::Segment}},
      {Op::Overlap, "overlap", S::Violation, {S::Segment, S::Segment}},
      {Op::Detach, "detach", S::Violation, {S::Segment, S::Segment}},
      {Op::OnTop, "on_top", S::Violation, {S::Segment, S::Segment}},
      {Op::OnBottom, "on_bottom", S::Violation, {S::Segment, S::Segment}},
      {Op::OnLeft, "on_left", S::Violation, {S::Segment, S::Segment}},
      {Op::OnRight, "on_right", S::Violation, {S::Segment, S::Segment}},
      {Op::Plus, "plus", S::Number, {S::Number, S::Number}},
      {Op::Minus, "minus", S::Number, {S::Number, S::Number}},
      {Op::Mul, "mul", S::Number, {S::Number, S::Number}},
      {Op::Div, "div", S::Number, {S::Number, S::Number}},
      {Op::Min, "min", S::Number, {S::Number, S::Number}},
      {Op::Max, "max", S::Number, {S::Number, S::Number}},
      {Op::VertLen, "vert_len", S::Number, {S::Segment}},
      {Op::HoriLen, "hori_len", S::Number, {S::Segment}},
      {Op::CenterX, "center_x", S::Number, {S::Segment}},
      {Op::CenterY, "center_y", S::Number, {S::Segment}},
      {Op::LongDirX, "long_dir_x", S::Number, {S::Segment}},
      {Op::LongDirY, "long_dir_y", S::Number, {S::Segment}},
      {Op::ShortDirX, "short_dir_x", S::Number, {S::Segment}},
      {Op::ShortDirY, "short_dir_y", S::Number, {S::Segment}},
      {Op::MinX, "min_x", S::Number, {S::Segment}},
      {Op::MinY, "min_y", S::Number, {S::Segment}},
      {Op::MaxX, "max_x", S::Number, {S::Segment}},
      {Op::MaxY, "max_y", S::Number, {S::Segment}},
      {Op::Old, "old", S::Segment, {S::Segment}},
      {Op::Top, "top", S::Segment, {S::Segment}},
      {Op::Bot, "bot", S::Segment, {S::Segment}},
      {Op::Left, "left", S::Segment, {S::Segment}},
      {Op::Right, "right", S::Segment, {S::Segment}},
      {Op::Union, "union", S::Segment, {S::Segment}, true},
      {Op::Inter, "inter", S::Segment, {S::Segment}, true},
      {Op::AvgDist, "avg_dist", S::Number, {S::Segment, S::Segment}},
      {Op::MinDist, "min_dist", S::Number, {S::Segment, S::Segment}},
      {Op::MaxDist, "max_dist", S::Number, {S::Segment, S::Segment}},
      {Op::Angle, "angle", S::Number, {S::Segment, S::Segment}},
      {Op::CenterDist, "center_dist", S::Number, {S::Segment, S::Segment}},
      {Op::Number, "<number>", S::Number, {}},
      {Op::SegRef, "<segment>", S::Segment, {}},
      {Op::Point, "<point>", S::Point, {}},
  };
  return table;
}

constexpr std::array<std::pair<std::string_view, std::string_view>, 14> kAliases = {{
    {"horizontal_length", "hori_len"},
    {"vertical_length", "vert_len"},
    {"old_copy", "old"},
    {"move", "translate"},
    {"top_inner_region", "top"},
    {"bottom_inner_region", "bot"},
    {"left_inner_region", "left"},
    {"right_inner_region", "right"},
    {"center_distance", "center_dist"},
    {"min_distance", "min_dist"},
    {"max_distance", "max_dist"},
    {"avg_distance", "avg_dist"},
    {"bottom", "bot"},
    {"intersection", "inter"},
}};

constexpr std::array<std::pair<std::string_view, MotionKind>, 5> kMotions = {{
    {"translate", MotionKind::Translate},
    {"rotate", MotionKind::Rotate},
    {"scale", MotionKind::Scale},
    {"stay", MotionKind::Stay},
    {"adjust", MotionKind::Adjust},
}};

std::string_view sort_name(Sort s) {
  switch (s) {
    case S::Violation: return "constraint";
    case S::Number: return "number";
    case S::Segment: return "segment";
    case S::Point: return "point";
  }
  return "?";
}

const OpInfo* find_op(std::string_view canonical) {
  for (const OpInfo& info : op_table()) {
    if (info.name == canonical) return &info;
  }
  return nullptr;
}

std::optional<MotionKind> find_motion(std::string_view canonical) {
  for (const auto& [name, kind] : kMotions) {
    if (name == canonical) return kind;
  }
  return std::nullopt;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string suggestion(std::string_view word) {
  std::vector<std::string_view> candidates = operator_names();
  for (const auto& [alias, _] : kAliases) candidates.push_back(alias);
  std::string_view best;
  std::size_t best_d = word.size();
  for (std::string_view c : candidates) {
    const std::size_t d = edit_distance(word, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best.empty() || best_d > std::max<std::size_t>(2, word.size() / 3)) return {};
  return std::string(best);
}

std::optional<int> parse_segref(std::string_view id) {
  if (id.size() < 4 || id.substr(0, 3) != "seg") return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(id.data() + 3, id.data() + id.size(), value);
  if (ec != std::errc() || ptr != id.data() + id.size()) return std::nullopt;
  return value;
}

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, Number, LParen, RParen, LBracket, RBracket, Comma, Plus, Minus, Star, Slash, Newline, End };

struct Token {
  Tok kind;
  std::string text;
  double number = 0;
  int line = 1;
  int column = 1;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  const auto push = [&](Tok k, std::string text, int c) { out.push_back({k, std::move(text), 0, line, c}); };
  while (i < src.size()) {
    const char ch = src[i];
    if (ch == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (ch == '\n') {
      push(Tok::Newline, "\\n", col);
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\\') {
      // A lone backslash shows up in programs copied from typeset tables.
      ++i;
      ++col;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      const std::size_t b = i;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      push(Tok::Ident, std::string(src.substr(b, i - b)), col);
      col += static_cast<int>(i - b);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || (ch == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      const std::size_t b = i;
      while (i < src.size() && (std::isdigit(static_cast<unsigned char>(src[i])) || src[i] == '.')) ++i;
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
          i = j;
          while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
        }
      }
      const std::string text(src.substr(b, i - b));
      double value = 0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ParseError("malformed number '" + text + "'", line, col);
      }
      out.push_back({Tok::Number, text, value, line, col});
      col += static_cast<int>(i - b);
      continue;
    }
    Tok k;
    switch (ch) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBracket; break;
      case ']': k = Tok::RBracket; break;
      case ',': k = Tok::Comma; break;
      case '+': k = Tok::Plus; break;
      case '-': k = Tok::Minus; break;
      case '*': k = Tok::Star; break;
      case '/': k = Tok::Slash; break;
      case '%':
        throw ParseError("percentages are not supported; write a fractional multiplier such as 0.5", line, col);
      default:
        throw ParseError(std::string("unexpected character '") + ch + "'", line, col);
    }
    push(k, std::string(1, ch), col);
    ++i;
    ++col;
  }
  out.push_back({Tok::End, "<end>", 0, line, col});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::vector<Token> tokens, const Scene* scene) : toks_(std::move(tokens)), scene_(scene) {}

  ConstraintProgram program() {
    ConstraintProgram prog;
    while (true) {
      while (peek().kind == Tok::Newline || peek().kind == Tok::Comma) ++pos_;
      if (peek().kind == Tok::End) break;
      statement(prog);
      const Token& t = peek();
      if (t.kind != Tok::Newline && t.kind != Tok::Comma && t.kind != Tok::End) {
        throw ParseError("expected newline or ',' between statements, got '" + t.text + "'", t.line, t.column);
      }
    }
    return prog;
  }

 private:
  struct Parsed {
    Node node;
    Sort sort;
  };

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }

  void skip_newlines() {
    while (depth_ > 0 && peek().kind == Tok::Newline) ++pos_;
  }

  const Token& expect(Tok k, std::string_view what) {
    skip_newlines();
    const Token& t = peek();
    if (t.kind != k) throw ParseError("expected " + std::string(what) + ", got '" + t.text + "'", t.line, t.column);
    return next();
  }

  void statement(ConstraintProgram& prog) {
    const Token& head = peek();
    if (head.kind == Tok::Ident) {
      const std::optional<std::string> canon = canonical_name(head.text);
      if (canon) {
        if (const auto motion = find_motion(*canon)) {
          next();
          expect(Tok::LParen, "'('");
          ++depth_;
          std::vector<Parsed> args = arguments();
          --depth_;
          if (args.size() != 1 || args[0].node.op != Op::SegRef) {
            throw ParseError(std::string(motion_name(*motion)) + " expects 1 segment reference, got " +
                                 std::to_string(args.size()) + " argument(s)",
                             head.line, head.column);
          }
          prog.motions.push_back({args[0].node.segment, *motion});
          return;
        }
      }
    }
    Parsed p = expr();
    if (p.sort != S::Violation) {
      throw ParseError("statement must be a constraint specifier or motion specifier (got a " +
                           std::string(sort_name(p.sort)) + " expression)",
                       head.line, head.column);
    }
    prog.constraints.push_back(std::move(p.node));
  }

  Parsed expr() {
    Parsed lhs = term();
    while (true) {
      skip_newlines();
      const Token& t = peek();
      if (t.kind != Tok::Plus && t.kind != Tok::Minus) return lhs;
      next();
      Parsed rhs = term();
      lhs = binary(t.kind == Tok::Plus ? Op::Plus : Op::Minus, std::move(lhs), std::move(rhs), t);
    }
  }

  Parsed term() {
    Parsed lhs = factor();
    while (true) {
      skip_newlines();
      const Token& t = peek();
      if (t.kind != Tok::Star && t.kind != Tok::Slash) return lhs;
      next();
      Parsed rhs = factor();
      lhs = binary(t.kind == Tok::Star ? Op::Mul : Op::Div, std::move(lhs), std::move(rhs), t);
    }
  }

  Parsed binary(Op op, Parsed lhs, Parsed rhs, const Token& at) {
    for (const Parsed* side : {&lhs, &rhs}) {
      if (side->sort != S::Number) {
        throw ParseError("operator '" + at.text + "' expects number operands, got " +
                             std::string(sort_name(side->sort)),
                         at.line, at.column);
      }
    }
    Node n;
    n.op = op;
    n.children.push_back(std::move(lhs.node));
    n.children.push_back(std::move(rhs.node));
    return {std::move(n), S::Number};
  }

  Parsed factor() {
    skip_newlines();
    const Token& t = next();
    switch (t.kind) {
      case Tok::Number:
        return {make_number(t.number), S::Number};
      case Tok::Minus: {
        Parsed inner = factor();
        if (inner.sort != S::Number) throw ParseError("unary '-' expects a number", t.line, t.column);
        if (inner.node.op == Op::Number) {
          inner.node.number = -inner.node.number;
          return inner;
        }
        return {make(Op::Minus, {make_number(0), std::move(inner.node)}), S::Number};
      }
      case Tok::LParen: {
        ++depth_;
        Parsed inner = expr();
        --depth_;
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBracket: {
        ++depth_;
        const double x = signed_number();
        expect(Tok::Comma, "','");
        const double y = signed_number();
        --depth_;
        expect(Tok::RBracket, "']'");
        return {make_point({x, y}), S::Point};
      }
      case Tok::Ident:
        return identifier(t);
      default:
        throw ParseError("unexpected '" + t.text + "'", t.line, t.column);
    }
  }

  double signed_number() {
    skip_newlines();
    double sign = 1;
    if (peek().kind == Tok::Minus) {
      next();
      sign = -1;
    }
    const Token& t = expect(Tok::Number, "number");
    return sign * t.number;
  }

  Parsed identifier(const Token& t) {
    if (const auto id = parse_segref(t.text)) {
      if (scene_ && !scene_->has_segment(*id)) {
        throw ParseError("unresolved segment reference " + t.text + " (scene has " +
                             std::to_string(scene_->segments.size()) + " segments)",
                         t.line, t.column);
      }
      return {make_segref(*id), S::Segment};
    }
    const std::optional<std::string> canon = canonical_name(t.text);
    if (!canon) {
      const std::string hint = suggestion(t.text);
      throw ParseError("unknown identifier '" + t.text + "'" + (hint.empty() ? "" : " (did you mean '" + hint + "'?)"),
                       t.line, t.column);
    }
    if (find_motion(*canon)) {
      throw ParseError("motion specifier '" + t.text + "' must be a statement of its own", t.line, t.column);
    }
    const OpInfo* info = find_op(*canon);
    expect(Tok::LParen, "'(' after " + t.text);
    ++depth_;
    std::vector<Parsed> args = arguments();
    --depth_;
    Node n;
    n.op = info->op;
    for (Parsed& a : args) n.children.push_back(std::move(a.node));
    check_call(*info, args, t);
    return {std::move(n), info->result};
  }

  std::vector<Parsed> arguments() {
    std::vector<Parsed> args;
    skip_newlines();
    if (peek().kind == Tok::RParen) {
      next();
      return args;
    }
    while (true) {
      args.push_back(expr());
      skip_newlines();
      const Token& t = next();
      if (t.kind == Tok::RParen) return args;
      if (t.kind != Tok::Comma) throw ParseError("expected ',' or ')', got '" + t.text + "'", t.line, t.column);
    }
  }

  void check_call(const OpInfo& info, const std::vector<Parsed>& args, const Token& at) {
    std::vector<Sort> sorts;
    for (const Parsed& a : args) sorts.push_back(a.sort);
    if (std::string err = signature_error(info, sorts); !err.empty()) throw ParseError(err, at.line, at.column);
  }

 public:
  static std::string signature_error(const OpInfo& info, const std::vector<Sort>& sorts) {
    const std::string name(info.name);
    if (info.variadic) {
      if (sorts.size() < 2) {
        return name + " expects at least 2 " + std::string(sort_name(info.args[0])) + " arguments, got " +
               std::to_string(sorts.size());
      }
    } else if (sorts.size() != info.args.size()) {
      const bool uniform = std::all_of(info.args.begin(), info.args.end(), [&](Sort s) { return s == info.args[0]; });
      if (uniform) {
        return name + " expects " + std::to_string(info.args.size()) + " " + std::string(sort_name(info.args[0])) +
               " argument" + (info.args.size() == 1 ? "" : "s") + ", got " + std::to_string(sorts.size());
      }
      std::string list;
      for (Sort s : info.args) list += (list.empty() ? "" : ", ") + std::string(sort_name(s));
      return name + " expects " + std::to_string(info.args.size()) + " arguments (" + list + "), got " +
             std::to_string(sorts.size());
    }
    for (std::size_t i = 0; i < sorts.size(); ++i) {
      const Sort want = info.variadic ? info.args[0] : info.args[i];
      if (sorts[i] != want) {
        return name + " argument " + std::to_string(i + 1) + ": expected " + std::string(sort_name(want)) + ", got " +
               std::string(sort_name(sorts[i]));
      }
    }
    return {};
  }

 private:
  std::vector<Token> toks_;
  const Scene* scene_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

Sort check_node(const Node& n) {
  switch (n.op) {
    case Op::Number: return S::Number;
    case Op::SegRef: return S::Segment;
    case Op::Point: return S::Point;
    default: break;
  }
  const OpInfo& info = op_info(n.op);
  std::vector<Sort> sorts;
  for (const Node& c : n.children) sorts.push_back(check_node(c));
  if (std::string err = Parser::signature_error(info, sorts); !err.empty()) throw ParseError(err);
  if (n.op == Op::CoincideOnPoint && (n.children[0].op != Op::SegRef || n.children[2].op != Op::SegRef)) {
    throw ParseError("coincide_on_point anchors must refer to plain segment references");
  }
  return info.result;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void write_node(std::ostream& os, const Node& n) {
  switch (n.op) {
    case Op::Number: os << format_number(n.number); return;
    case Op::SegRef: os << "seg" << n.segment; return;
    case Op::Point: os << '[' << format_number(n.point.x) << ", " << format_number(n.point.y) << ']'; return;
    default: break;
  }
  os << op_info(n.op).name << '(';
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) os << ", ";
    write_node(os, n.children[i]);
  }
  os << ')';
}

void collect_segments(const Node& n, std::set<int>& out) {
  if (n.op == Op::SegRef) out.insert(n.segment);
  for (const Node& c : n.children) collect_segments(c, out);
}

}  // namespace

const OpInfo& op_info(Op op) {
  for (const OpInfo& info : op_table()) {
    if (info.op == op) return info;
  }
  throw Error("unknown operator");
}

std::vector<std::string_view> operator_names() {
  std::vector<std::string_view> names;
  for (const auto& [name, _] : kMotions) names.push_back(name);
  for (const OpInfo& info : op_table()) {
    if (info.op != Op::Number && info.op != Op::SegRef && info.op != Op::Point) names.push_back(info.name);
  }
  return names;
}

std::string_view motion_name(MotionKind kind) {
  for (const auto& [name, k] : kMotions) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<std::string> canonical_name(std::string_view identifier) {
  for (const auto& [alias, canon] : kAliases) {
    if (alias == identifier) return std::string(canon);
  }
  if (find_motion(identifier) || (find_op(identifier) && identifier.front() != '<')) {
    return std::string(identifier);
  }
  return std::nullopt;
}

ConstraintProgram parse(std::string_view source, const Scene* scene) {
  Parser parser(lex(source), scene);
  ConstraintProgram prog = parser.program();
  for (const Node& c : prog.constraints) check(c);
  return prog;
}

void check(const Node& node) {
  const Sort s = check_node(node);
  if (s != S::Violation) throw ParseError("constraint root must be a constraint specifier");
}

std::string serialize(const Node& node) {
  std::ostringstream os;
  write_node(os, node);
  return os.str();
}

std::string serialize(const ConstraintProgram& program) {
  std::ostringstream os;
  for (const MotionSpec& m : program.motions) os << motion_name(m.kind) << "(seg" << m.target << ")\n";
  for (const Node& c : program.constraints) {
    write_node(os, c);
    os << '\n';
  }
  return os.str();
}

Node make_number(double v) {
  Node n;
  n.op = Op::Number;
  n.number = v;
  return n;
}

Node make_segref(int id) {
  Node n;
  n.op = Op::SegRef;
  n.segment = id;
  return n;
}

Node make_point(Vec2 p) {
  Node n;
  n.op = Op::Point;
  n.point = p;
  return n;
}

Node make(Op op, std::vector<Node> children) {
  Node n;
  n.op = op;
  n.children = std::move(children);
  return n;
}

std::vector<int> referenced_segments(const Node& node) {
  std::set<int> ids;
  collect_segments(node, ids);
  return {ids.begin(), ids.end()};
}

std::string ValidationReport::text() const {
  std::ostringstream os;
  const auto list = [](const std::vector<int>& ids) {
    std::string s;
    for (int id : ids) s += (s.empty() ? "" : ", ") + ("seg" + std::to_string(id));
    return s.empty() ? std::string("-") : s;
  };
  os << "referenced segments: " << list(referenced) << " (" << referenced.size() << ")\n";
  os << "movable segments: " << list(movable) << " (" << movable.size() << ")\n";
  os << "constraints: " << constraint_count << '\n';
  for (const std::string& w : warnings) os << "warning: " << w << '\n';
  for (const std::string& e : errors) os << "error: " << e << '\n';
  return os.str();
}

ValidationReport validate(const ConstraintProgram& program, const Scene& scene) {
  ValidationReport report;
  report.constraint_count = program.constraints.size();
  std::set<int> referenced;
  std::set<int> movable;
  std::set<int> stayed;
  std::map<int, std::set<MotionKind>> kinds;
  for (const MotionSpec& m : program.motions) {
    referenced.insert(m.target);
    kinds[m.target].insert(m.kind);
    if (m.kind == MotionKind::Stay) {
      stayed.insert(m.target);
    } else {
      movable.insert(m.target);
    }
  }
  for (const auto& [id, ks] : kinds) {
    if (ks.contains(MotionKind::Stay) && ks.size() > 1) {
      report.warnings.push_back("seg" + std::to_string(id) + " has both stay and a movement specifier");
    }
  }
  for (std::size_t i = 0; i < program.constraints.size(); ++i) {
    const Node& c = program.constraints[i];
    const std::vector<int> ids = referenced_segments(c);
    referenced.insert(ids.begin(), ids.end());
    try {
      check(c);
    } catch (const ParseError& e) {
      report.errors.push_back("constraint " + std::to_string(i + 1) + ": " + e.what());
    }
    if (!ids.empty() && std::all_of(ids.begin(), ids.end(), [&](int id) { return stayed.contains(id); })) {
      report.warnings.push_back("constraint " + std::to_string(i + 1) + " (" + serialize(c) +
                                ") only references stay-pinned segments; motion cannot satisfy it");
    }
  }
  for (int id : referenced) {
    if (!scene.has_segment(id)) {
      report.errors.push_back("unresolved segment reference seg" + std::to_string(id) + " (scene has " +
                              std::to_string(scene.segments.size()) + " segments)");
    }
  }
  report.referenced.assign(referenced.begin(), referenced.end());
  std::erase_if(movable, [&](int id) { return stayed.contains(id); });
  report.movable.assign(movable.begin(), movable.end());
  return report;
}

}  // namespace iconforge::dsl
