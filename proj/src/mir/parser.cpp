#include "isskit/mir/parser.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "isskit/mir/catalog.hpp"
#include "isskit/mir/verify.hpp"

namespace isskit::mir {

ParseError::ParseError(SourceSpan span, const std::string& message)
    : std::runtime_error(to_string(span) + ": " + message),
      span_(std::move(span)),
      message_(message) {}

namespace {

using rt::BigInt;

enum class Tok { Ident, Number, TypeName, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
  BigInt number;
  unsigned radix_width = 0;  // digits x bits per digit for 0x/0b literals
  bool negative = false;
};

class Lexer {
 public:
  Lexer(std::string_view text, std::shared_ptr<const std::string> file)
      : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) {
        Token t;
        t.kind = Tok::End;
        t.span = span_here(0);
        out.push_back(t);
        return out;
      }
      out.push_back(next());
    }
  }

 private:
  SourceSpan span_here(uint32_t len) const { return {file_, line_, col_, len}; }

  char peek(size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = peek();
      if (c == '/' && peek(1) == '/') {
        while (pos_ < text_.size() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '@';
  }

  [[noreturn]] void fail(const std::string& msg, uint32_t len = 1) {
    throw ParseError(span_here(len), msg);
  }

  Token next() {
    Token t;
    SourceSpan start = span_here(0);
    size_t begin = pos_;
    char c = peek();
    auto finish = [&](Tok kind) {
      t.kind = kind;
      t.span = start;
      t.span.length = static_cast<uint32_t>(pos_ - begin);
      if (t.text.empty()) t.text = std::string(text_.substr(begin, pos_ - begin));
      return t;
    };
    if (ident_start(c)) {
      while (ident_char(peek())) advance();
      return finish(Tok::Ident);
    }
    if (c == '%') {
      advance();
      if (!ident_start(peek())) fail("expected a type name after '%'");
      size_t name_begin = pos_;
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      t.text = std::string(text_.substr(name_begin, pos_ - name_begin));
      return finish(Tok::TypeName);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      if (c == '-') {
        t.negative = true;
        advance();
      }
      if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'b')) {
        bool hex = peek(1) == 'x';
        advance();
        advance();
        unsigned digits = 0;
        while (true) {
          char d = peek();
          if (d == '_') {
            advance();
            continue;
          }
          int v = -1;
          if (hex && std::isxdigit(static_cast<unsigned char>(d)))
            v = std::isdigit(static_cast<unsigned char>(d)) ? d - '0' : (std::tolower(d) - 'a' + 10);
          else if (!hex && (d == '0' || d == '1'))
            v = d - '0';
          if (v < 0) break;
          t.number = t.number * (hex ? 16 : 2) + v;
          ++digits;
          advance();
        }
        if (digits == 0) fail("literal has no digits", static_cast<uint32_t>(pos_ - begin));
        if (ident_char(peek())) fail("malformed numeric literal", static_cast<uint32_t>(pos_ - begin + 1));
        t.radix_width = digits * (hex ? 4 : 1);
      } else {
        while (std::isdigit(static_cast<unsigned char>(peek()))) {
          t.number = t.number * 10 + (peek() - '0');
          advance();
        }
        if (ident_char(peek())) fail("malformed numeric literal", static_cast<uint32_t>(pos_ - begin + 1));
      }
      if (t.negative) t.number = -t.number;
      return finish(Tok::Number);
    }
    if (c == '"') {
      advance();
      std::string s;
      while (true) {
        if (pos_ >= text_.size() || peek() == '\n') fail("unterminated string");
        char d = peek();
        advance();
        if (d == '"') break;
        if (d == '\\') {
          char e = peek();
          advance();
          s += e == 'n' ? '\n' : e;
        } else {
          s += d;
        }
      }
      t.text = s;
      return finish(Tok::String);
    }
    if (c == ':' && peek(1) == ':') {
      advance();
      advance();
      return finish(Tok::Punct);
    }
    if (c == '-' && peek(1) == '>') {
      advance();
      advance();
      return finish(Tok::Punct);
    }
    if (std::string_view("{}()<>,:=").find(c) != std::string_view::npos) {
      advance();
      return finish(Tok::Punct);
    }
    fail(fmt::format("unexpected character '{}'", c));
  }

  std::string_view text_;
  std::shared_ptr<const std::string> file_;
  size_t pos_ = 0;
  uint32_t line_ = 1, col_ = 1;
};

// ---- raw syntax tree ----------------------------------------------------

struct RawType {
  Type type;
  SourceSpan span;
};

struct RawOperand {
  enum class Kind { Name, Number, Bool, Unit, Enum } kind = Kind::Name;
  std::string name;    // value name, or enum type name
  std::string member;  // enum member
  BigInt number;
  unsigned radix_width = 0;
  bool flag = false;
  SourceSpan span;
};

struct RawTypeArg {
  bool is_int = false;
  int64_t value = 0;
  std::string name;
};

struct RawStmt {
  std::string result;
  std::optional<RawType> type;
  std::string opname;
  SourceSpan op_span;
  bool has_targs = false;
  std::vector<RawTypeArg> targs;
  std::vector<RawOperand> args;
  SourceSpan span;
};

struct RawTerm {
  Terminator::Kind kind = Terminator::Kind::None;
  RawOperand value;
  std::string target, other;
  SourceSpan target_span, other_span;
  std::vector<RawOperand> args;
  std::string message;
  SourceSpan span;
};

struct RawParam {
  std::string name;
  RawType type;
  SourceSpan span;
};

struct RawBlock {
  std::string label;
  std::vector<RawParam> params;
  std::vector<RawStmt> stmts;
  RawTerm term;
  SourceSpan span;
};

struct RawFn {
  std::string name;
  std::vector<RawParam> params;
  RawType ret;
  std::vector<RawBlock> blocks;
  SourceSpan span;
};

struct RawUnionVariant {
  std::string name;
  std::vector<RawType> fields;
  SourceSpan span;
};

struct RawDecl {
  enum class Kind { Enum, Union, Record, Register } kind;
  std::string name;
  std::vector<std::string> members;
  std::vector<RawUnionVariant> variants;
  std::vector<RawParam> fields;
  RawType type;
  SourceSpan span;
};

struct RawProgram {
  bool has_header = false;
  std::string name, loop_fn, pc_reg, tick_fn;
  SourceSpan header_span;
  std::vector<RawDecl> decls;
  std::vector<RawFn> fns;
  size_t tokens = 0;
};

const std::unordered_set<std::string> kKeywords = {"program", "enum",   "union",  "record",
                                                   "register", "fn",    "goto",   "branch",
                                                   "return",  "halt",   "raise",  "true",
                                                   "false"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  void parse_into(RawProgram& out) {
    out.tokens += toks_.size() - 1;
    while (!at_end()) {
      const Token& t = cur();
      if (is_ident("program")) {
        header(out);
      } else if (is_ident("enum") || is_ident("union") || is_ident("record")) {
        out.decls.push_back(type_decl());
      } else if (is_ident("register")) {
        out.decls.push_back(register_decl());
      } else if (is_ident("fn")) {
        out.fns.push_back(function());
      } else {
        fail(t, fmt::format("expected a declaration, found '{}'", t.text));
      }
    }
  }

 private:
  const Token& cur() const { return toks_[pos_]; }
  const Token& look(size_t k) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return cur().kind == Tok::End; }
  bool is_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool is_ident(const char* s) const { return cur().kind == Tok::Ident && cur().text == s; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) {
    SourceSpan s = t.span;
    if (s.length == 0) s.length = 1;
    throw ParseError(s, msg);
  }

  const Token& take() { return toks_[pos_++]; }

  void expect(const char* p) {
    if (!is_punct(p)) fail(cur(), fmt::format("expected '{}', found '{}'", p, describe(cur())));
    ++pos_;
  }

  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  std::string name(const char* what) {
    if (cur().kind != Tok::Ident) fail(cur(), fmt::format("expected {}, found '{}'", what, describe(cur())));
    return take().text;
  }

  RawType type() {
    const Token& t = cur();
    if (t.kind != Tok::TypeName) fail(t, fmt::format("expected a type, found '{}'", describe(t)));
    ++pos_;
    RawType r;
    r.span = t.span;
    const std::string& n = t.text;
    if (n == "bv") {
      r.type = Type::bv_generic();
    } else if (n.size() > 2 && n.rfind("bv", 0) == 0 &&
               std::all_of(n.begin() + 2, n.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      int w = std::stoi(n.substr(2));
      if (w < 1 || w > 64) fail(t, fmt::format("bitvector width {} outside 1..64", w));
      r.type = Type::bv(w);
    } else if (n == "i64") {
      r.type = Type::i64();
    } else if (n == "i") {
      r.type = Type::int_generic();
    } else if (n == "bool") {
      r.type = Type::boolean();
    } else if (n == "unit") {
      r.type = Type::unit();
    } else if (n == "enum" || n == "union" || n == "record") {
      std::string nm = name("a type name");
      r.type = n == "enum" ? Type::enumeration(nm) : n == "union" ? Type::union_of(nm) : Type::record(nm);
    } else {
      fail(t, fmt::format("unknown type '%{}'", n));
    }
    return r;
  }

  void header(RawProgram& out) {
    const Token& kw = take();
    if (out.has_header) fail(kw, "duplicate program header");
    out.has_header = true;
    out.header_span = kw.span;
    out.name = name("a program name");
    expect("{");
    while (!is_punct("}")) {
      const Token& key = cur();
      std::string k = name("a header key");
      expect("=");
      std::string v = name("a name");
      if (k == "loop") out.loop_fn = v;
      else if (k == "pc") out.pc_reg = v;
      else if (k == "tick") out.tick_fn = v;
      else fail(key, fmt::format("unknown header key '{}'", k));
    }
    expect("}");
  }

  RawDecl type_decl() {
    RawDecl d;
    const Token& kw = take();
    d.span = kw.span;
    d.kind = kw.text == "enum" ? RawDecl::Kind::Enum
             : kw.text == "union" ? RawDecl::Kind::Union
                                  : RawDecl::Kind::Record;
    d.name = name("a type name");
    expect("{");
    while (!is_punct("}")) {
      if (d.kind == RawDecl::Kind::Enum) {
        d.members.push_back(name("an enum member"));
      } else if (d.kind == RawDecl::Kind::Union) {
        RawUnionVariant v;
        v.span = cur().span;
        v.name = name("a variant name");
        expect("(");
        while (!is_punct(")")) {
          v.fields.push_back(type());
          if (!is_punct(")")) expect(",");
        }
        expect(")");
        d.variants.push_back(std::move(v));
      } else {
        RawParam f;
        f.span = cur().span;
        f.name = name("a field name");
        expect(":");
        f.type = type();
        d.fields.push_back(std::move(f));
      }
      if (!is_punct("}")) expect(",");
    }
    expect("}");
    return d;
  }

  RawDecl register_decl() {
    RawDecl d;
    d.kind = RawDecl::Kind::Register;
    d.span = take().span;
    d.name = name("a register name");
    expect(":");
    d.type = type();
    return d;
  }

  std::vector<RawParam> params() {
    std::vector<RawParam> ps;
    expect("(");
    while (!is_punct(")")) {
      RawParam p;
      p.span = cur().span;
      p.name = name("a parameter name");
      expect(":");
      p.type = type();
      ps.push_back(std::move(p));
      if (!is_punct(")")) expect(",");
    }
    expect(")");
    return ps;
  }

  RawFn function() {
    RawFn f;
    f.span = take().span;
    const Token& nt = cur();
    f.name = name("a function name");
    if (kKeywords.count(f.name) || opcode_from_name(f.name))
      fail(nt, fmt::format("'{}' is reserved and cannot name a function", f.name));
    f.params = params();
    expect("->");
    f.ret = type();
    expect("{");
    while (!is_punct("}")) {
      if (at_end()) fail(cur(), "unexpected end of input inside function");
      f.blocks.push_back(block());
    }
    expect("}");
    if (f.blocks.empty()) fail(toks_[pos_ - 1], fmt::format("function '{}' has no blocks", f.name));
    return f;
  }

  RawBlock block() {
    RawBlock b;
    b.span = cur().span;
    if (!(cur().kind == Tok::Ident && look(1).kind == Tok::Punct && look(1).text == ":"))
      fail(cur(), fmt::format("expected a block label, found '{}'", describe(cur())));
    b.label = take().text;
    expect(":");
    if (is_punct("(")) b.params = params();
    while (true) {
      if (at_end() || is_punct("}")) fail(cur(), fmt::format("block '{}' has no terminator", b.label));
      if (cur().kind != Tok::Ident) fail(cur(), fmt::format("expected a statement, found '{}'", describe(cur())));
      const std::string& w = cur().text;
      if (w == "goto" || w == "branch" || w == "return" || w == "halt" || w == "raise") {
        b.term = terminator();
        return b;
      }
      b.stmts.push_back(statement());
    }
  }

  SourceSpan span_from(const SourceSpan& start) const {
    SourceSpan s = start;
    const Token& last = toks_[pos_ - 1];
    if (last.span.line == start.line) s.length = last.span.column + last.span.length - start.column;
    else s.length = start.length;
    return s;
  }

  RawOperand operand() {
    RawOperand o;
    const Token& t = cur();
    o.span = t.span;
    if (t.kind == Tok::Number) {
      o.kind = RawOperand::Kind::Number;
      o.number = t.number;
      o.radix_width = t.radix_width;
      ++pos_;
      return o;
    }
    if (is_punct("(")) {
      ++pos_;
      expect(")");
      o.kind = RawOperand::Kind::Unit;
      o.span.length = 2;
      return o;
    }
    if (t.kind != Tok::Ident) fail(t, fmt::format("expected an operand, found '{}'", describe(t)));
    ++pos_;
    if (t.text == "true" || t.text == "false") {
      o.kind = RawOperand::Kind::Bool;
      o.flag = t.text == "true";
      return o;
    }
    if (is_punct("::")) {
      ++pos_;
      o.kind = RawOperand::Kind::Enum;
      o.name = t.text;
      o.member = name("an enum member");
      o.span = span_from(t.span);
      return o;
    }
    o.kind = RawOperand::Kind::Name;
    o.name = t.text;
    return o;
  }

  std::vector<RawOperand> operand_list() {
    std::vector<RawOperand> out;
    expect("(");
    while (!is_punct(")")) {
      out.push_back(operand());
      if (!is_punct(")")) expect(",");
    }
    expect(")");
    return out;
  }

  RawStmt statement() {
    RawStmt s;
    SourceSpan start = cur().span;
    s.span = start;
    if (look(1).kind == Tok::Punct && look(1).text == ":") {
      s.result = take().text;
      ++pos_;
      s.type = type();
      expect("=");
    }
    const Token& op = cur();
    s.op_span = op.span;
    s.opname = name("an operation");
    if (is_punct("<")) {
      s.has_targs = true;
      ++pos_;
      while (!is_punct(">")) {
        RawTypeArg a;
        if (cur().kind == Tok::Number) {
          if (cur().number < -(BigInt(1) << 62) || cur().number > (BigInt(1) << 62))
            fail(cur(), "type argument out of range");
          a.is_int = true;
          a.value = static_cast<int64_t>(cur().number);
          ++pos_;
        } else {
          a.name = name("a type argument");
        }
        s.targs.push_back(std::move(a));
        if (!is_punct(">")) expect(",");
      }
      expect(">");
    }
    s.args = operand_list();
    s.span = span_from(start);
    return s;
  }

  RawTerm terminator() {
    RawTerm t;
    SourceSpan start = cur().span;
    std::string kw = take().text;
    if (kw == "goto") {
      t.kind = Terminator::Kind::Goto;
      t.target_span = cur().span;
      t.target = name("a block label");
      if (is_punct("(")) t.args = operand_list();
    } else if (kw == "branch") {
      t.kind = Terminator::Kind::Branch;
      t.value = operand();
      t.target_span = cur().span;
      t.target = name("a block label");
      t.other_span = cur().span;
      t.other = name("a block label");
    } else if (kw == "return") {
      t.kind = Terminator::Kind::Return;
      t.value = operand();
    } else if (kw == "halt") {
      t.kind = Terminator::Kind::Halt;
    } else {
      t.kind = Terminator::Kind::Raise;
      if (cur().kind != Tok::String) fail(cur(), "expected a message string after 'raise'");
      t.message = take().text;
    }
    t.span = span_from(start);
    return t;
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// ---- semantic construction ----------------------------------------------

[[noreturn]] void fail_at(const SourceSpan& s, const std::string& msg) {
  SourceSpan t = s;
  if (t.length == 0) t.length = 1;
  throw ParseError(t, msg);
}

void check_type_names(const Type& t, const SourceSpan& span, const Program& p) {
  bool ok = true;
  if (t.kind == TypeKind::Enum) ok = p.find_enum(t.name) != nullptr;
  if (t.kind == TypeKind::Union) ok = p.find_union(t.name) != nullptr;
  if (t.kind == TypeKind::Record) ok = p.find_record(t.name) != nullptr;
  if (!ok) fail_at(span, fmt::format("unknown type {}", to_string(t)));
}

rt::Value literal_of(const RawOperand& o, const Type& want, const Program& p) {
  using K = RawOperand::Kind;
  auto mismatch = [&](const char* what) -> rt::Value {
    fail_at(o.span, fmt::format("{} literal where {} is expected", what, to_string(want)));
  };
  switch (o.kind) {
    case K::Bool:
      if (want.kind != TypeKind::Bool) return mismatch("boolean");
      return o.flag;
    case K::Unit:
      if (want.kind != TypeKind::Unit) return mismatch("unit");
      return rt::Unit{};
    case K::Enum: {
      auto it = p.enum_index.find(o.name);
      if (it == p.enum_index.end()) fail_at(o.span, fmt::format("unknown enum '{}'", o.name));
      const EnumDecl& e = p.enums[it->second];
      auto m = std::find(e.members.begin(), e.members.end(), o.member);
      if (m == e.members.end())
        fail_at(o.span, fmt::format("enum '{}' has no member '{}'", o.name, o.member));
      if (want.kind != TypeKind::Enum || want.name != o.name) return mismatch("enum");
      return rt::EnumVal{it->second, static_cast<uint32_t>(m - e.members.begin())};
    }
    case K::Number:
      switch (want.kind) {
        case TypeKind::BvFixed: {
          if (o.radix_width != 0 && o.radix_width != want.width)
            fail_at(o.span, fmt::format("literal has width {}, expected {}", o.radix_width, want.width));
          if (o.number < 0 || o.number >= (BigInt(1) << want.width))
            fail_at(o.span, fmt::format("literal does not fit {}", to_string(want)));
          return rt::Bits{want.width, static_cast<uint64_t>(o.number)};
        }
        case TypeKind::BvGeneric:
          if (o.radix_width == 0 || o.number < 0)
            fail_at(o.span, "generic bitvector literals are written in hex or binary");
          return rt::GenericBits{o.radix_width, o.number};
        case TypeKind::IntMachine:
          if (o.number < BigInt(std::numeric_limits<int64_t>::min()) ||
              o.number > BigInt(std::numeric_limits<int64_t>::max()))
            fail_at(o.span, "literal does not fit %i64");
          return rt::I64{static_cast<int64_t>(o.number)};
        case TypeKind::IntGeneric: {
          rt::Context scratch;
          return rt::make_int(scratch, o.number);
        }
        default:
          return mismatch("numeric");
      }
    case K::Name:
      break;
  }
  fail_at(o.span, "internal: not a literal");
}

class Builder {
 public:
  explicit Builder(Program& p) : p_(p) {}

  void declarations(const RawProgram& raw) {
    p_.name = raw.name;
    p_.loop_fn = raw.loop_fn;
    p_.pc_reg = raw.pc_reg;
    p_.tick_fn = raw.tick_fn;
    std::unordered_map<std::string, SourceSpan> type_names, variants, registers;
    auto unique = [](auto& map, const std::string& n, const SourceSpan& s, const char* what) {
      if (!map.emplace(n, s).second) fail_at(s, fmt::format("duplicate {} '{}'", what, n));
    };
    for (auto& d : raw.decls) {
      switch (d.kind) {
        case RawDecl::Kind::Enum: {
          unique(type_names, d.name, d.span, "type");
          std::unordered_set<std::string> seen;
          for (auto& m : d.members)
            if (!seen.insert(m).second) fail_at(d.span, fmt::format("duplicate member '{}'", m));
          p_.enums.push_back({d.name, d.members, false});
          break;
        }
        case RawDecl::Kind::Union: {
          unique(type_names, d.name, d.span, "type");
          UnionDecl u;
          u.name = d.name;
          EnumDecl tag{d.name, {}, true};
          for (auto& v : d.variants) {
            unique(variants, v.name, v.span, "union variant");
            UnionVariant uv{v.name, {}};
            for (auto& f : v.fields) uv.fields.push_back(f.type);
            u.variants.push_back(std::move(uv));
            tag.members.push_back(v.name);
          }
          p_.unions.push_back(std::move(u));
          p_.enums.push_back(std::move(tag));
          break;
        }
        case RawDecl::Kind::Record: {
          unique(type_names, d.name, d.span, "type");
          RecordDecl r{d.name, {}};
          std::unordered_set<std::string> seen;
          for (auto& f : d.fields) {
            if (!seen.insert(f.name).second) fail_at(f.span, fmt::format("duplicate field '{}'", f.name));
            r.fields.push_back({f.name, f.type.type});
          }
          p_.records.push_back(std::move(r));
          break;
        }
        case RawDecl::Kind::Register:
          unique(registers, d.name, d.span, "register");
          p_.registers.push_back({d.name, d.type.type});
          break;
      }
    }
    std::unordered_set<std::string> fn_names;
    for (auto& f : raw.fns) {
      if (!fn_names.insert(f.name).second) fail_at(f.span, fmt::format("duplicate function '{}'", f.name));
      Function fn;
      fn.name = f.name;
      fn.span = f.span;
      fn.ret = f.ret.type;
      p_.functions.push_back(std::move(fn));
    }
    p_.reindex();
    for (auto& d : raw.decls) {
      for (auto& v : d.variants)
        for (auto& t : v.fields) check_type_names(t.type, t.span, p_);
      for (auto& f : d.fields) check_type_names(f.type.type, f.type.span, p_);
      if (d.kind == RawDecl::Kind::Register) check_type_names(d.type.type, d.type.span, p_);
    }
    // Function signatures must exist before bodies are typed.
    for (size_t i = 0; i < raw.fns.size(); ++i) {
      const RawFn& rf = raw.fns[i];
      Function& fn = p_.functions[i];
      check_type_names(rf.ret.type, rf.ret.span, p_);
      for (auto& prm : rf.params) {
        check_type_names(prm.type.type, prm.type.span, p_);
        for (ValueId v : fn.params)
          if (fn.values[v].name == prm.name)
            fail_at(prm.span, fmt::format("duplicate parameter '{}'", prm.name));
        fn.params.push_back(fn.add_value(prm.name, prm.type.type));
      }
    }
  }

  void body(const RawFn& rf, Function& fn) {
    std::unordered_map<std::string, ValueId> names;
    for (ValueId v : fn.params) names.emplace(fn.values[v].name, v);
    auto define = [&](const std::string& n, const RawType& t) -> ValueId {
      check_type_names(t.type, t.span, p_);
      auto it = names.find(n);
      if (it != names.end()) {
        if (fn.values[it->second].type != t.type)
          fail_at(t.span, fmt::format("local '{}' redeclared as {} (was {})", n, to_string(t.type),
                                      to_string(fn.values[it->second].type)));
        return it->second;
      }
      ValueId v = fn.add_value(n, t.type);
      names.emplace(n, v);
      return v;
    };
    std::unordered_map<std::string, BlockId> labels;
    for (auto& rb : rf.blocks) {
      if (!labels.emplace(rb.label, static_cast<BlockId>(labels.size())).second)
        fail_at(rb.span, fmt::format("duplicate block label '{}'", rb.label));
      Block b;
      b.label = rb.label;
      b.span = rb.span;
      for (auto& prm : rb.params) b.params.push_back(define(prm.name, prm.type));
      for (auto& rs : rb.stmts) {
        Statement s;
        s.span = rs.span;
        if (rs.type) s.result = define(rs.result, *rs.type);
        b.stmts.push_back(std::move(s));
      }
      fn.blocks.push_back(std::move(b));
    }

    auto resolve_name = [&](const RawOperand& o) -> std::optional<ValueId> {
      if (o.kind != RawOperand::Kind::Name) return std::nullopt;
      auto it = names.find(o.name);
      if (it == names.end()) fail_at(o.span, fmt::format("unknown value '{}'", o.name));
      return it->second;
    };
    auto typed = [&](const RawOperand& o, const Type& want) -> Operand {
      if (auto v = resolve_name(o)) return Operand::value(*v);
      return Operand::lit(literal_of(o, want, p_));
    };
    auto label = [&](const std::string& l, const SourceSpan& s) {
      auto it = labels.find(l);
      if (it == labels.end()) fail_at(s, fmt::format("unknown block label '{}'", l));
      return it->second;
    };

    for (size_t bi = 0; bi < rf.blocks.size(); ++bi) {
      const RawBlock& rb = rf.blocks[bi];
      Block& b = fn.blocks[bi];
      for (size_t si = 0; si < rb.stmts.size(); ++si) {
        const RawStmt& rs = rb.stmts[si];
        Statement& s = b.stmts[si];
        s.op = operation(rs);
        std::optional<Type> first;
        if (!rs.args.empty()) {
          if (auto v = resolve_name(rs.args[0])) first = fn.values[*v].type;
          else if (rs.args[0].kind == RawOperand::Kind::Enum) first = Type::enumeration(rs.args[0].name);
        }
        auto sig = signature(s.op, p_, first ? &*first : nullptr);
        if (auto err = std::get_if<std::string>(&sig)) fail_at(rs.op_span, *err);
        const Signature& g = std::get<Signature>(sig);
        if (g.params.size() != rs.args.size())
          fail_at(rs.op_span, fmt::format("'{}' expects {} operands, got {}", rs.opname,
                                          g.params.size(), rs.args.size()));
        for (size_t k = 0; k < rs.args.size(); ++k) s.args.push_back(typed(rs.args[k], g.params[k]));
      }
      const RawTerm& rt_ = rb.term;
      Terminator t;
      t.kind = rt_.kind;
      t.span = rt_.span;
      t.message = rt_.message;
      switch (rt_.kind) {
        case Terminator::Kind::Goto: {
          t.target = label(rt_.target, rt_.target_span);
          const Block& dst = fn.blocks[t.target];
          if (dst.params.size() != rt_.args.size())
            fail_at(rt_.span, fmt::format("goto {} passes {} arguments, block takes {}", rt_.target,
                                          rt_.args.size(), dst.params.size()));
          for (size_t k = 0; k < rt_.args.size(); ++k)
            t.args.push_back(typed(rt_.args[k], fn.values[dst.params[k]].type));
          break;
        }
        case Terminator::Kind::Branch:
          t.value = typed(rt_.value, Type::boolean());
          t.target = label(rt_.target, rt_.target_span);
          t.other = label(rt_.other, rt_.other_span);
          break;
        case Terminator::Kind::Return:
          t.value = typed(rt_.value, fn.ret);
          break;
        default:
          break;
      }
      b.term = std::move(t);
    }
  }

  OpKind operation(const RawStmt& rs) {
    OpKind op;
    auto code = opcode_from_name(rs.opname);
    if (!code || *code == Opcode::call) {
      if (!p_.find_function(rs.opname) || rs.has_targs)
        fail_at(rs.op_span, fmt::format("unknown operation '{}'", rs.opname));
      op.code = Opcode::call;
      op.name = rs.opname;
      return op;
    }
    op.code = *code;
    unsigned want_ints = opcode_int_args(*code);
    bool want_name = opcode_takes_name(*code);
    size_t k = 0;
    if (want_name) {
      if (rs.targs.empty() || rs.targs[0].is_int)
        fail_at(rs.op_span, fmt::format("'{}' needs a name type argument", rs.opname));
      op.name = rs.targs[0].name;
      k = 1;
    }
    if (rs.targs.size() - k != want_ints)
      fail_at(rs.op_span, fmt::format("'{}' takes {} integer type arguments, got {}", rs.opname,
                                      want_ints, rs.targs.size() - k));
    for (unsigned i = 0; i < want_ints; ++i, ++k) {
      if (!rs.targs[k].is_int)
        fail_at(rs.op_span, fmt::format("'{}' type argument {} must be an integer", rs.opname, k));
      op.ints[i] = rs.targs[k].value;
    }
    return op;
  }

 private:
  Program& p_;
};

void parse_raw(std::string_view text, const std::string& file, RawProgram& raw) {
  auto fname = std::make_shared<const std::string>(file);
  Lexer lx(text, fname);
  Parser ps(lx.run());
  ps.parse_into(raw);
}

Program build(const RawProgram& raw, const SourceSpan& where) {
  if (raw.tokens == 0) fail_at(where, "empty program");
  Program p;
  Builder b(p);
  b.declarations(raw);
  for (size_t i = 0; i < raw.fns.size(); ++i) b.body(raw.fns[i], p.functions[i]);
  resolve_symbols(p);
  auto diags = verify_weak(p);
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    SourceSpan s = d.span.valid() ? d.span : where;
    if (!d.span.valid() && raw.has_header) s = raw.header_span;
    fail_at(s, to_string(Diagnostic{d.function, d.block, d.statement, d.message, {}}));
  }
  return p;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Program parse_program(std::string_view text, const std::string& file_name) {
  RawProgram raw;
  parse_raw(text, file_name, raw);
  return build(raw, SourceSpan{std::make_shared<const std::string>(file_name), 1, 1, 1});
}

Program parse_files(const std::vector<std::string>& paths) {
  RawProgram raw;
  for (auto& path : paths) parse_raw(read_file(path), path, raw);
  std::string first = paths.empty() ? std::string("<input>") : paths.front();
  return build(raw, SourceSpan{std::make_shared<const std::string>(first), 1, 1, 1});
}

Program load_model(const std::string& dir_or_file) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_directory(dir_or_file)) {
    for (auto& e : fs::directory_iterator(dir_or_file))
      if (e.path().extension() == ".mir") files.push_back(e.path().string());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .mir files in " + dir_or_file);
  } else {
    files.push_back(dir_or_file);
  }
  Program p = parse_files(files);
  to_ssa(p);
  auto diags = verify(p);
  if (!diags.empty()) throw std::runtime_error("model does not verify: " + to_string(diags.front()));
  return p;
}

// ---- printing ----------------------------------------------------------

namespace {

std::string bits_text(unsigned width, const BigInt& bits) {
  if (width % 4 == 0) {
    std::string hex = bits.str(0, std::ios_base::hex);
    std::transform(hex.begin(), hex.end(), hex.begin(), [](char c) { return std::toupper(c); });
    return "0x" + std::string(width / 4 - std::min<size_t>(hex.size(), width / 4), '0') + hex;
  }
  std::string bin;
  for (unsigned i = width; i-- > 0;) bin += bit_test(bits, i) ? '1' : '0';
  return "0b" + bin;
}

std::string operand_text(const Function& f, const Operand& o, const Program& p) {
  if (o.is_value()) return f.values[o.id].name;
  return format_literal(o.literal, p);
}

std::string params_text(const Function& f, const std::vector<ValueId>& ps) {
  std::string s;
  for (size_t i = 0; i < ps.size(); ++i)
    s += fmt::format("{}{}: {}", i ? ", " : "", f.values[ps[i]].name, to_string(f.values[ps[i]].type));
  return s;
}

}  // namespace

std::string format_literal(const rt::Value& v, const Program& p) {
  if (auto b = v.get_if<rt::Bits>()) return bits_text(b->width, BigInt(b->bits));
  if (auto g = v.get_if<rt::GenericBits>()) return bits_text(g->width, g->bits);
  if (auto i = v.get_if<rt::I64>()) return std::to_string(i->v);
  if (auto n = v.get_if<rt::GenericInt>()) return n->to_big().str();
  if (auto b = v.get_if<bool>()) return *b ? "true" : "false";
  if (v.is<rt::Unit>()) return "()";
  if (auto e = v.get_if<rt::EnumVal>()) {
    if (e->type < p.enums.size() && e->member < p.enums[e->type].members.size())
      return p.enums[e->type].name + "::" + p.enums[e->type].members[e->member];
  }
  return "<" + rt::debug_string(v) + ">";
}

std::string pretty_print(const Function& f, const Program& p) {
  std::string out = fmt::format("fn {}({}) -> {} {{\n", f.name, params_text(f, f.params), to_string(f.ret));
  for (auto& b : f.blocks) {
    out += b.label + ":";
    if (!b.params.empty()) out += " (" + params_text(f, b.params) + ")";
    out += "\n";
    for (auto& s : b.stmts) {
      out += "  ";
      if (s.result != kNoValue)
        out += fmt::format("{}: {} = ", f.values[s.result].name, to_string(f.values[s.result].type));
      out += to_string(s.op) + "(";
      for (size_t i = 0; i < s.args.size(); ++i) out += (i ? ", " : "") + operand_text(f, s.args[i], p);
      out += ")\n";
    }
    const Terminator& t = b.term;
    switch (t.kind) {
      case Terminator::Kind::Goto:
        out += "  goto " + f.blocks[t.target].label;
        if (!t.args.empty()) {
          out += "(";
          for (size_t i = 0; i < t.args.size(); ++i) out += (i ? ", " : "") + operand_text(f, t.args[i], p);
          out += ")";
        }
        out += "\n";
        break;
      case Terminator::Kind::Branch:
        out += fmt::format("  branch {} {} {}\n", operand_text(f, t.value, p), f.blocks[t.target].label,
                           f.blocks[t.other].label);
        break;
      case Terminator::Kind::Return:
        out += "  return " + operand_text(f, t.value, p) + "\n";
        break;
      case Terminator::Kind::Halt:
        out += "  halt\n";
        break;
      case Terminator::Kind::Raise: {
        std::string esc;
        for (char c : t.message) {
          if (c == '"' || c == '\\') esc += '\\';
          if (c == '\n') {
            esc += "\\n";
            continue;
          }
          esc += c;
        }
        out += "  raise \"" + esc + "\"\n";
        break;
      }
      case Terminator::Kind::None:
        out += "  // missing terminator\n";
        break;
    }
  }
  return out + "}\n";
}

std::string pretty_print(const Program& p) {
  std::string out;
  if (!p.name.empty() || !p.loop_fn.empty() || !p.pc_reg.empty() || !p.tick_fn.empty()) {
    out += fmt::format("program {} {{\n", p.name.empty() ? "unnamed" : p.name);
    if (!p.loop_fn.empty()) out += "  loop = " + p.loop_fn + "\n";
    if (!p.pc_reg.empty()) out += "  pc = " + p.pc_reg + "\n";
    if (!p.tick_fn.empty()) out += "  tick = " + p.tick_fn + "\n";
    out += "}\n\n";
  }
  for (auto& e : p.enums) {
    if (e.implicit) continue;
    out += "enum " + e.name + " {";
    for (size_t i = 0; i < e.members.size(); ++i) out += (i ? ", " : " ") + e.members[i];
    out += " }\n";
  }
  for (auto& u : p.unions) {
    out += "union " + u.name + " {\n";
    for (auto& v : u.variants) {
      out += "  " + v.name + "(";
      for (size_t i = 0; i < v.fields.size(); ++i) out += (i ? ", " : "") + to_string(v.fields[i]);
      out += "),\n";
    }
    out += "}\n";
  }
  for (auto& r : p.records) {
    out += "record " + r.name + " {";
    for (size_t i = 0; i < r.fields.size(); ++i)
      out += fmt::format("{}{}: {}", i ? ", " : " ", r.fields[i].name, to_string(r.fields[i].type));
    out += " }\n";
  }
  for (auto& r : p.registers) out += fmt::format("register {}: {}\n", r.name, to_string(r.type));
  for (auto& f : p.functions) out += "\n" + pretty_print(f, p);
  return out;
}

// ---- structural comparison ----------------------------------------------

namespace {

struct Cmp {
  std::string* why;
  bool fail(const std::string& msg) {
    if (why && why->empty()) *why = msg;
    return false;
  }
};

bool operand_eq(const Function& fa, const Operand& a, const Function& fb, const Operand& b) {
  if (a.is_value() != b.is_value()) return false;
  if (a.is_value()) return fa.values[a.id].name == fb.values[b.id].name && fa.values[a.id].type == fb.values[b.id].type;
  return a.literal == b.literal && a.literal.rep().index() == b.literal.rep().index();
}

bool operands_eq(const Function& fa, const std::vector<Operand>& a, const Function& fb,
                 const std::vector<Operand>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!operand_eq(fa, a[i], fb, b[i])) return false;
  return true;
}

bool values_eq(const Function& fa, const std::vector<ValueId>& a, const Function& fb,
               const std::vector<ValueId>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (fa.values[a[i]].name != fb.values[b[i]].name || fa.values[a[i]].type != fb.values[b[i]].type)
      return false;
  return true;
}

}  // namespace

bool structurally_equal(const Function& a, const Function& b, const Program&, const Program&,
                        std::string* why) {
  Cmp c{why};
  auto where = [&](const std::string& what) { return a.name + ": " + what; };
  if (a.name != b.name) return c.fail("function names differ: " + a.name + " vs " + b.name);
  if (a.ret != b.ret) return c.fail(where("return types differ"));
  if (!values_eq(a, a.params, b, b.params)) return c.fail(where("parameters differ"));
  if (a.blocks.size() != b.blocks.size()) return c.fail(where("block counts differ"));
  for (size_t i = 0; i < a.blocks.size(); ++i) {
    const Block &x = a.blocks[i], &y = b.blocks[i];
    std::string at = where("block " + x.label);
    if (x.label != y.label) return c.fail(at + ": labels differ");
    if (!values_eq(a, x.params, b, y.params)) return c.fail(at + ": parameters differ");
    if (x.stmts.size() != y.stmts.size()) return c.fail(at + ": statement counts differ");
    for (size_t k = 0; k < x.stmts.size(); ++k) {
      const Statement &s = x.stmts[k], &t = y.stmts[k];
      std::string st = fmt::format("{}: statement {}", at, k);
      if (!(s.op == t.op)) return c.fail(st + ": operations differ");
      if ((s.result == kNoValue) != (t.result == kNoValue)) return c.fail(st + ": results differ");
      if (s.result != kNoValue && !values_eq(a, {s.result}, b, {t.result})) return c.fail(st + ": results differ");
      if (!operands_eq(a, s.args, b, t.args)) return c.fail(st + ": operands differ");
    }
    const Terminator &s = x.term, &t = y.term;
    if (s.kind != t.kind) return c.fail(at + ": terminators differ");
    bool same = true;
    switch (s.kind) {
      case Terminator::Kind::Goto:
        same = a.blocks[s.target].label == b.blocks[t.target].label && operands_eq(a, s.args, b, t.args);
        break;
      case Terminator::Kind::Branch:
        same = operand_eq(a, s.value, b, t.value) && a.blocks[s.target].label == b.blocks[t.target].label &&
               a.blocks[s.other].label == b.blocks[t.other].label;
        break;
      case Terminator::Kind::Return:
        same = operand_eq(a, s.value, b, t.value);
        break;
      case Terminator::Kind::Raise:
        same = s.message == t.message;
        break;
      default:
        break;
    }
    if (!same) return c.fail(at + ": terminators differ");
  }
  return true;
}

bool structurally_equal(const Program& a, const Program& b, std::string* why) {
  Cmp c{why};
  if (a.name != b.name || a.loop_fn != b.loop_fn || a.pc_reg != b.pc_reg || a.tick_fn != b.tick_fn)
    return c.fail("program headers differ");
  if (a.enums.size() != b.enums.size()) return c.fail("enum counts differ");
  for (size_t i = 0; i < a.enums.size(); ++i)
    if (a.enums[i].name != b.enums[i].name || a.enums[i].members != b.enums[i].members ||
        a.enums[i].implicit != b.enums[i].implicit)
      return c.fail("enum " + a.enums[i].name + " differs");
  if (a.unions.size() != b.unions.size()) return c.fail("union counts differ");
  for (size_t i = 0; i < a.unions.size(); ++i) {
    const auto &x = a.unions[i], &y = b.unions[i];
    bool same = x.name == y.name && x.variants.size() == y.variants.size();
    for (size_t k = 0; same && k < x.variants.size(); ++k)
      same = x.variants[k].name == y.variants[k].name && x.variants[k].fields == y.variants[k].fields;
    if (!same) return c.fail("union " + x.name + " differs");
  }
  if (a.records.size() != b.records.size()) return c.fail("record counts differ");
  for (size_t i = 0; i < a.records.size(); ++i) {
    const auto &x = a.records[i], &y = b.records[i];
    bool same = x.name == y.name && x.fields.size() == y.fields.size();
    for (size_t k = 0; same && k < x.fields.size(); ++k)
      same = x.fields[k].name == y.fields[k].name && x.fields[k].type == y.fields[k].type;
    if (!same) return c.fail("record " + x.name + " differs");
  }
  if (a.registers.size() != b.registers.size()) return c.fail("register counts differ");
  for (size_t i = 0; i < a.registers.size(); ++i)
    if (a.registers[i].name != b.registers[i].name || a.registers[i].type != b.registers[i].type)
      return c.fail("register " + a.registers[i].name + " differs");
  if (a.functions.size() != b.functions.size()) return c.fail("function counts differ");
  for (size_t i = 0; i < a.functions.size(); ++i)
    if (!structurally_equal(a.functions[i], b.functions[i], a, b, why)) return false;
  return true;
}

}  // namespace isskit::mir
