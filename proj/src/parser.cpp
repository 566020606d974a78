#include "nvlang/parser.hpp"

#include <fmt/format.h>

#include <charconv>
#include <set>

namespace nvlang::syntax {

namespace {

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::Indent:
    case TokenKind::Dedent:
    case TokenKind::Newline: return std::string(tokenKindName(t.kind));
    case TokenKind::StringLiteral: return fmt::format("string \"{}\"", t.lexeme);
    default: return t.lexeme.empty() ? std::string(tokenKindName(t.kind)) : fmt::format("'{}'", t.lexeme);
  }
}

class Parser {
 public:
  explicit Parser(std::span<const Token> tokens) : toks_(tokens.begin(), tokens.end()) {
    Span end;
    if (!toks_.empty()) {
      end = toks_.back().span;
      end.begin = end.end;
    }
    toks_.push_back(Token{TokenKind::Operator, "<eof>", end});
  }

  SourceProgram program() {
    SourceProgram prog;
    skipNewlines();
    while (!atEof()) {
      if (peek().isKeyword("import")) {
        Span s = next().span;
        if (peek().kind != TokenKind::Identifier && peek().kind != TokenKind::TypeIdentifier) fail("module name");
        prog.imports.push_back(Import{next().lexeme, s});
        expectNewline();
      } else {
        prog.decls.push_back(decl());
      }
      skipNewlines();
    }
    return prog;
  }

 private:
  // ---- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool atEof() const { return pos_ + 1 >= toks_.size(); }
  bool prevWasDedent() const { return pos_ > 0 && toks_[pos_ - 1].kind == TokenKind::Dedent; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw CompileError(ErrorKind::Parse, peek().span,
                       fmt::format("expected {}, found {}", expected, describe(peek())));
  }

  bool acceptOp(std::string_view op) {
    if (peek().isOp(op)) {
      next();
      return true;
    }
    return false;
  }
  bool acceptKeyword(std::string_view kw) {
    if (peek().isKeyword(kw)) {
      next();
      return true;
    }
    return false;
  }
  const Token& expectOp(std::string_view op) {
    if (!peek().isOp(op)) fail(fmt::format("'{}'", op));
    return next();
  }
  const Token& expectKeyword(std::string_view kw) {
    if (!peek().isKeyword(kw)) fail(fmt::format("'{}'", kw));
    return next();
  }
  const Token& expectKind(TokenKind kind, std::string_view what) {
    if (peek().kind != kind) fail(std::string(what));
    return next();
  }
  const Token& expectWord(std::string_view word) {
    if (!peek().is(TokenKind::Identifier, word)) fail(fmt::format("'{}'", word));
    return next();
  }
  void expectNewline() {
    if (peek().kind == TokenKind::Newline) {
      next();
      return;
    }
    if (atEof()) return;
    fail("one of: NEWLINE, end of input");
  }
  void skipNewlines() {
    while (peek().kind == TokenKind::Newline) next();
  }

  // ---- declarations --------------------------------------------------------

  Decl decl() {
    const Token& t = peek();
    Span s = t.span;
    if (t.isKeyword("fn")) return Decl{fnDecl(), s, {}};
    if (t.isKeyword("type")) return Decl{typeDecl(), s, {}};
    if (t.isKeyword("actor")) return Decl{actorDecl(), s, {}};
    if (t.isKeyword("supervisor")) return Decl{supervisorDecl(), s, {}};
    if (t.isKeyword("external")) return Decl{externalDecl(), s, {}};
    fail("one of: 'fn', 'type', 'actor', 'supervisor', 'external', 'import'");
  }

  std::vector<Param> paramList() {
    std::vector<Param> params;
    expectOp("(");
    if (!peek().isOp(")")) {
      do {
        const Token& n = peek().isOp("_") ? next() : expectKind(TokenKind::Identifier, "parameter name");
        Param p{n.lexeme, std::nullopt, n.span};
        if (acceptOp(":")) p.annotation = typeExpr();
        params.push_back(std::move(p));
      } while (acceptOp(","));
    }
    expectOp(")");
    std::set<std::string> seen;
    for (const auto& p : params) {
      if (p.name != "_" && !seen.insert(p.name).second) {
        throw CompileError(ErrorKind::Parse, p.span, fmt::format("duplicate parameter '{}'", p.name));
      }
    }
    return params;
  }

  // `-> [Type]` then NEWLINE block.
  std::optional<TypeExpr> resultAnnotation() {
    std::optional<TypeExpr> result;
    if (acceptOp("->") && peek().kind != TokenKind::Newline) result = typeExpr();
    return result;
  }

  FnDecl fnDecl() {
    expectKeyword("fn");
    FnDecl fn;
    fn.name = expectKind(TokenKind::Identifier, "function name").lexeme;
    fn.params = paramList();
    fn.result = resultAnnotation();
    expectKind(TokenKind::Newline, "NEWLINE before function body");
    fn.body = block();
    return fn;
  }

  TypeDecl typeDecl() {
    expectKeyword("type");
    TypeDecl td;
    td.name = expectKind(TokenKind::TypeIdentifier, "type name").lexeme;
    if (acceptOp("[")) {
      do {
        td.typeParams.push_back(expectKind(TokenKind::TypeIdentifier, "type parameter").lexeme);
      } while (acceptOp(","));
      expectOp("]");
    }
    expectOp("=");
    if (peek().kind == TokenKind::Newline) {
      next();
      expectKind(TokenKind::Indent, "INDENT before constructors");
      while (peek().kind != TokenKind::Dedent) {
        expectOp("|");
        td.ctors.push_back(constructor());
        expectNewline();
      }
      next();
    } else {
      acceptOp("|");
      td.ctors.push_back(constructor());
      while (acceptOp("|")) td.ctors.push_back(constructor());
      expectNewline();
    }
    std::set<std::string> seen;
    for (const auto& c : td.ctors) {
      if (!seen.insert(c.name).second) {
        throw CompileError(ErrorKind::Parse, c.span,
                           fmt::format("duplicate constructor '{}' in type {}", c.name, td.name));
      }
    }
    return td;
  }

  Constructor constructor() {
    const Token& n = expectKind(TokenKind::TypeIdentifier, "constructor name");
    Constructor c{n.lexeme, {}, n.span};
    if (acceptOp("(")) {
      do {
        std::string field;
        if (peek().kind == TokenKind::Identifier && peek(1).isOp(":")) {
          field = next().lexeme;
          next();
        }
        c.fields.emplace_back(field, typeExpr());
      } while (acceptOp(","));
      expectOp(")");
    }
    return c;
  }

  ActorDecl actorDecl() {
    expectKeyword("actor");
    ActorDecl a;
    a.name = expectKind(TokenKind::TypeIdentifier, "actor name").lexeme;
    expectKind(TokenKind::Newline, "NEWLINE after actor name");
    expectKind(TokenKind::Indent, "indented 'fn run(self)'");
    skipNewlines();
    expectKeyword("fn");
    if (!peek().is(TokenKind::Identifier, "run")) fail("'run' (actors define exactly one fn run(self))");
    next();
    auto params = paramList();
    if (params.size() != 1) {
      throw CompileError(ErrorKind::Parse, peek().span, "actor 'run' takes exactly one parameter (self)");
    }
    a.selfName = params[0].name;
    a.result = resultAnnotation();
    expectKind(TokenKind::Newline, "NEWLINE before run body");
    a.runBody = block();
    skipNewlines();
    if (peek().kind != TokenKind::Dedent) fail("end of actor (actors define exactly one fn run(self))");
    next();
    return a;
  }

  SupervisorDecl supervisorDecl() {
    expectKeyword("supervisor");
    SupervisorDecl s;
    s.name = expectKind(TokenKind::TypeIdentifier, "supervisor name").lexeme;
    expectKind(TokenKind::Newline, "NEWLINE after supervisor name");
    expectKind(TokenKind::Indent, "indented supervisor body");
    bool sawStrategy = false;
    while (peek().kind != TokenKind::Dedent) {
      if (peek().is(TokenKind::Identifier, "strategy")) {
        next();
        const Token& st = expectKind(TokenKind::Identifier, "strategy name");
        if (st.lexeme == "one_for_one") s.strategy = Strategy::OneForOne;
        else if (st.lexeme == "one_for_all") s.strategy = Strategy::OneForAll;
        else if (st.lexeme == "rest_for_one") s.strategy = Strategy::RestForOne;
        else {
          throw CompileError(ErrorKind::Parse, st.span,
                             fmt::format("expected one of: one_for_one, one_for_all, rest_for_one, found '{}'",
                                         st.lexeme));
        }
        sawStrategy = true;
        expectNewline();
      } else if (peek().is(TokenKind::Identifier, "restarts")) {
        next();
        int n = intValue(expectKind(TokenKind::IntLiteral, "restart count"));
        expectWord("within");
        int w = intValue(expectKind(TokenKind::IntLiteral, "restart window"));
        s.restartLimit = std::make_pair(n, w);
        expectNewline();
      } else if (peek().is(TokenKind::Identifier, "children")) {
        next();
        expectKind(TokenKind::Newline, "NEWLINE after 'children'");
        expectKind(TokenKind::Indent, "indented child list");
        while (peek().kind != TokenKind::Dedent) {
          s.children.push_back(childSpec());
          expectNewline();
        }
        next();
      } else {
        fail("one of: 'strategy', 'restarts', 'children'");
      }
    }
    next();
    if (!sawStrategy) throw CompileError(ErrorKind::Parse, peek().span, "supervisor needs a strategy");
    return s;
  }

  ChildSpecDecl childSpec() {
    ChildSpecDecl c;
    const Token& id = expectKind(TokenKind::Identifier, "child id");
    c.id = id.lexeme;
    c.span = id.span;
    expectOp(":");
    c.actor = expectKind(TokenKind::TypeIdentifier, "actor name").lexeme;
    c.args = argList();
    if (acceptOp(",")) {
      const Token& p = expectKind(TokenKind::Identifier, "restart policy");
      if (p.lexeme == "permanent") c.policy = RestartPolicy::Permanent;
      else if (p.lexeme == "transient") c.policy = RestartPolicy::Transient;
      else if (p.lexeme == "temporary") c.policy = RestartPolicy::Temporary;
      else {
        throw CompileError(ErrorKind::Parse, p.span,
                           fmt::format("expected one of: permanent, transient, temporary, found '{}'", p.lexeme));
      }
    }
    return c;
  }

  ExternalDecl externalDecl() {
    expectKeyword("external");
    expectKeyword("fn");
    ExternalDecl e;
    e.name = expectKind(TokenKind::Identifier, "external function name").lexeme;
    expectOp("(");
    if (!peek().isOp(")")) {
      do {
        e.params.push_back(typeExpr());
      } while (acceptOp(","));
    }
    expectOp(")");
    expectOp("->");
    e.result = typeExpr();
    expectOp("=");
    expectWord("mfa");
    e.module = expectKind(TokenKind::StringLiteral, "module name string").lexeme;
    e.function = expectKind(TokenKind::StringLiteral, "function name string").lexeme;
    e.arity = intValue(expectKind(TokenKind::IntLiteral, "arity"));
    expectNewline();
    return e;
  }

  int intValue(const Token& t) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), v);
    if (ec != std::errc()) throw CompileError(ErrorKind::Parse, t.span, "integer out of range");
    return v;
  }

  // ---- types ---------------------------------------------------------------

  TypeExpr typeExpr() {
    const Token& t = peek();
    TypeExpr ty;
    ty.span = t.span;
    if (t.kind == TokenKind::TypeIdentifier) {
      next();
      ty.kind = TypeExpr::Kind::Name;
      ty.name = t.lexeme;
      if (acceptOp("[")) {
        do {
          ty.args.push_back(typeExpr());
        } while (acceptOp(","));
        expectOp("]");
      }
      return ty;
    }
    if (t.kind == TokenKind::Identifier && t.lexeme != "_") {
      next();
      ty.kind = TypeExpr::Kind::Var;
      ty.name = t.lexeme;
      return ty;
    }
    if (t.isOp("[")) {
      next();
      ty.kind = TypeExpr::Kind::List;
      ty.args.push_back(typeExpr());
      expectOp("]");
      return ty;
    }
    if (t.isOp("(")) {
      next();
      ty.kind = TypeExpr::Kind::Tuple;
      if (acceptOp(")")) return ty;
      ty.args.push_back(typeExpr());
      if (acceptOp(")")) return std::move(ty.args[0]);
      while (acceptOp(",")) ty.args.push_back(typeExpr());
      expectOp(")");
      return ty;
    }
    if (t.isKeyword("fn")) {
      next();
      ty.kind = TypeExpr::Kind::Fn;
      expectOp("(");
      if (!peek().isOp(")")) {
        do {
          ty.args.push_back(typeExpr());
        } while (acceptOp(","));
      }
      expectOp(")");
      expectOp("->");
      ty.args.push_back(typeExpr());
      return ty;
    }
    fail("a type");
  }

  // ---- blocks and statements -------------------------------------------------

  ExprPtr block() {
    expectKind(TokenKind::Indent, "INDENT (indented block)");
    struct Stmt {
      std::optional<Pattern> letPattern;
      ExprPtr expr;
      Span span;
    };
    std::vector<Stmt> stmts;
    while (peek().kind != TokenKind::Dedent) {
      if (peek().kind == TokenKind::Newline) {
        next();
        continue;
      }
      Stmt st;
      st.span = peek().span;
      if (acceptKeyword("let")) {
        st.letPattern = pattern();
        expectOp("=");
      }
      st.expr = expr();
      stmts.push_back(std::move(st));
      if (peek().kind == TokenKind::Newline) {
        next();
      } else if (peek().kind != TokenKind::Dedent && !prevWasDedent()) {
        fail("one of: NEWLINE, DEDENT");
      }
    }
    Span end = next().span;
    if (stmts.empty()) return makeExpr(ExprKind::UnitLit, end);

    ExprPtr acc;
    for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) {
      if (it->letPattern) {
        auto let = makeExpr(ExprKind::Let, it->span);
        let->pattern = std::move(it->letPattern);
        let->children.push_back(std::move(it->expr));
        let->children.push_back(acc ? std::move(acc) : makeExpr(ExprKind::UnitLit, end));
        acc = std::move(let);
      } else if (!acc) {
        acc = std::move(it->expr);
      } else {
        auto seq = makeExpr(ExprKind::Seq, it->span);
        seq->children.push_back(std::move(it->expr));
        if (acc->kind == ExprKind::Seq) {
          for (auto& c : acc->children) seq->children.push_back(std::move(c));
        } else {
          seq->children.push_back(std::move(acc));
        }
        acc = std::move(seq);
      }
    }
    return acc;
  }

  // Either an indented block after NEWLINE or an inline expression.
  ExprPtr body() {
    if (peek().kind == TokenKind::Newline) {
      next();
      return block();
    }
    return expr();
  }

  std::vector<Arm> arms() {
    expectKind(TokenKind::Newline, "NEWLINE before arms");
    expectKind(TokenKind::Indent, "indented match arms");
    std::vector<Arm> out;
    while (peek().kind != TokenKind::Dedent) {
      if (peek().kind == TokenKind::Newline) {
        next();
        continue;
      }
      Pattern p = pattern();
      expectOp("->");
      ExprPtr b = body();
      out.push_back(Arm{std::move(p), std::move(b)});
      if (peek().kind == TokenKind::Newline) next();
      else if (peek().kind != TokenKind::Dedent && !prevWasDedent()) fail("one of: NEWLINE, DEDENT");
    }
    next();
    return out;
  }

  // ---- expressions ----------------------------------------------------------

  ExprPtr expr() { return pipe(); }

  static bool startsExpr(const Token& t) {
    switch (t.kind) {
      case TokenKind::IntLiteral:
      case TokenKind::FloatLiteral:
      case TokenKind::StringLiteral:
      case TokenKind::Identifier:
      case TokenKind::TypeIdentifier: return true;
      case TokenKind::Keyword:
        return t.lexeme != "then" && t.lexeme != "else" && t.lexeme != "type" && t.lexeme != "actor" &&
               t.lexeme != "supervisor" && t.lexeme != "external" && t.lexeme != "import" &&
               t.lexeme != "let";
      case TokenKind::Operator: return t.lexeme == "(" || t.lexeme == "[" || t.lexeme == "-" || t.lexeme == "_";
      default: return false;
    }
  }

  ExprPtr pipe() {
    ExprPtr lhs = bang();
    while (peek().isOp("|>")) {
      Span s = next().span;
      if (peek().isKeyword("await") && !startsExpr(peek(1))) {
        next();
        auto aw = makeExpr(ExprKind::Await, s);
        aw->children.push_back(std::move(lhs));
        lhs = std::move(aw);
        continue;
      }
      ExprPtr fn = bang();
      auto call = makeExpr(ExprKind::Call, s);
      call->children.push_back(std::move(fn));
      call->children.push_back(std::move(lhs));
      lhs = printSugar(std::move(call));
    }
    return lhs;
  }

  ExprPtr bang() {
    ExprPtr lhs = orExpr();
    if (peek().isOp("!")) {
      Span s = next().span;
      auto send = makeExpr(ExprKind::Send, s);
      send->children.push_back(std::move(lhs));
      send->children.push_back(orExpr());
      return send;
    }
    return lhs;
  }

  ExprPtr binary(ExprPtr lhs, const Token& op, ExprPtr rhs) {
    auto b = makeExpr(ExprKind::Binary, op.span);
    b->text = op.lexeme;
    b->children.push_back(std::move(lhs));
    b->children.push_back(std::move(rhs));
    return b;
  }

  ExprPtr orExpr() {
    ExprPtr lhs = andExpr();
    while (peek().isOp("||")) {
      const Token& op = next();
      lhs = binary(std::move(lhs), op, andExpr());
    }
    return lhs;
  }

  ExprPtr andExpr() {
    ExprPtr lhs = comparison();
    while (peek().isOp("&&")) {
      const Token& op = next();
      lhs = binary(std::move(lhs), op, comparison());
    }
    return lhs;
  }

  ExprPtr comparison() {
    ExprPtr lhs = consExpr();
    for (std::string_view op : {"==", "!=", "<", "<=", ">", ">="}) {
      if (peek().isOp(op)) {
        const Token& t = next();
        return binary(std::move(lhs), t, consExpr());
      }
    }
    return lhs;
  }

  ExprPtr consExpr() {
    ExprPtr head = additive();
    if (peek().isOp("::")) {
      Span s = next().span;
      auto c = makeExpr(ExprKind::Cons, s);
      c->children.push_back(std::move(head));
      c->children.push_back(consExpr());
      return c;
    }
    return head;
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (peek().isOp("+") || peek().isOp("-")) {
      const Token& op = next();
      lhs = binary(std::move(lhs), op, multiplicative());
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    while (peek().isOp("*") || peek().isOp("/") || peek().isOp("%")) {
      const Token& op = next();
      lhs = binary(std::move(lhs), op, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    const Token& t = peek();
    if (t.isOp("-") || t.isKeyword("not")) {
      next();
      auto u = makeExpr(ExprKind::Unary, t.span);
      u->text = t.lexeme;
      u->children.push_back(unary());
      return u;
    }
    if (t.isKeyword("await")) {
      next();
      auto aw = makeExpr(ExprKind::Await, t.span);
      aw->children.push_back(unary());
      return aw;
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (true) {
      if (peek().isOp("(")) {
        Span s = peek().span;
        auto call = makeExpr(ExprKind::Call, s);
        call->children.push_back(std::move(e));
        for (auto& a : argList()) call->children.push_back(std::move(a));
        e = printSugar(std::move(call));
      } else if (peek().isOp(".")) {
        Span s = next().span;
        if (!peek().is(TokenKind::Identifier, "send")) fail("'send' after '.'");
        next();
        auto send = makeExpr(ExprKind::Send, s);
        send->children.push_back(std::move(e));
        send->children.push_back(unary());
        e = std::move(send);
      } else {
        return e;
      }
    }
  }

  ExprPtr printSugar(ExprPtr call) {
    const Expr& callee = *call->children[0];
    if (callee.kind != ExprKind::Var || callee.text != "print") return call;
    if (call->children.size() != 2) {
      throw CompileError(ErrorKind::Parse, call->span, "print takes exactly one argument");
    }
    auto p = makeExpr(ExprKind::Print, call->span);
    p->children.push_back(std::move(call->children[1]));
    return p;
  }

  std::vector<ExprPtr> argList() {
    std::vector<ExprPtr> args;
    expectOp("(");
    if (!peek().isOp(")")) {
      do {
        args.push_back(expr());
      } while (acceptOp(","));
    }
    expectOp(")");
    return args;
  }

  ExprPtr primary() {
    const Token& t = peek();
    Span s = t.span;
    switch (t.kind) {
      case TokenKind::IntLiteral: {
        next();
        auto e = makeExpr(ExprKind::IntLit, s);
        auto [ptr, ec] = std::from_chars(t.lexeme.data(), t.lexeme.data() + t.lexeme.size(), e->intValue);
        if (ec != std::errc()) throw CompileError(ErrorKind::Parse, s, "integer literal out of 64-bit range");
        return e;
      }
      case TokenKind::FloatLiteral: {
        next();
        auto e = makeExpr(ExprKind::FloatLit, s);
        e->floatValue = std::stod(t.lexeme);
        return e;
      }
      case TokenKind::StringLiteral: {
        next();
        auto e = makeExpr(ExprKind::StringLit, s);
        e->text = t.lexeme;
        return e;
      }
      case TokenKind::Identifier: {
        if (t.lexeme == "_") fail("expression ('_' is only valid in patterns)");
        next();
        auto e = makeExpr(ExprKind::Var, s);
        e->text = t.lexeme;
        return e;
      }
      case TokenKind::TypeIdentifier: {
        next();
        auto e = makeExpr(ExprKind::Ctor, s);
        e->text = t.lexeme;
        if (peek().isOp("(")) e->children = argList();
        return e;
      }
      case TokenKind::Keyword: return keywordExpr();
      case TokenKind::Operator:
        if (t.isOp("(")) {
          next();
          if (acceptOp(")")) return makeExpr(ExprKind::UnitLit, s);
          ExprPtr first = expr();
          if (acceptOp(")")) return first;
          auto tup = makeExpr(ExprKind::Tuple, s);
          tup->children.push_back(std::move(first));
          while (acceptOp(",")) tup->children.push_back(expr());
          expectOp(")");
          return tup;
        }
        if (t.isOp("[")) {
          next();
          auto list = makeExpr(ExprKind::List, s);
          if (!peek().isOp("]")) {
            do {
              list->children.push_back(expr());
            } while (acceptOp(","));
          }
          expectOp("]");
          return list;
        }
        break;
      default: break;
    }
    fail("expression");
  }

  ExprPtr keywordExpr() {
    const Token& t = next();
    Span s = t.span;
    const std::string& kw = t.lexeme;
    if (kw == "true" || kw == "false") {
      auto e = makeExpr(ExprKind::BoolLit, s);
      e->boolValue = kw == "true";
      return e;
    }
    if (kw == "if") {
      auto e = makeExpr(ExprKind::If, s);
      e->children.push_back(expr());
      expectKeyword("then");
      e->children.push_back(body());
      if (peek().kind == TokenKind::Newline && peek(1).isKeyword("else")) next();
      if (acceptKeyword("else")) {
        e->children.push_back(body());
      } else {
        e->children.push_back(makeExpr(ExprKind::UnitLit, s));
      }
      return e;
    }
    if (kw == "case") {
      auto e = makeExpr(ExprKind::Case, s);
      e->children.push_back(expr());
      e->arms = arms();
      return e;
    }
    if (kw == "receive") {
      auto e = makeExpr(ExprKind::Receive, s);
      e->text = expectKind(TokenKind::Identifier, "message binder").lexeme;
      expectOp(":");
      e->annotation = typeExpr();
      e->arms = arms();
      return e;
    }
    if (kw == "loop") {
      auto e = makeExpr(ExprKind::Loop, s);
      expectKind(TokenKind::Newline, "NEWLINE after 'loop'");
      e->children.push_back(block());
      return e;
    }
    if (kw == "break") return makeExpr(ExprKind::Break, s);
    if (kw == "reply") {
      auto e = makeExpr(ExprKind::Reply, s);
      e->children.push_back(expr());
      return e;
    }
    if (kw == "spawn") {
      auto e = makeExpr(ExprKind::Spawn, s);
      e->text = expectKind(TokenKind::TypeIdentifier, "actor or supervisor name").lexeme;
      e->children = argList();
      return e;
    }
    if (kw == "fn") {
      auto e = makeExpr(ExprKind::Lambda, s);
      e->params = paramList();
      expectOp("->");
      e->children.push_back(body());
      return e;
    }
    --pos_;
    fail("expression");
  }

  // ---- patterns ----------------------------------------------------------------

  Pattern pattern() {
    Pattern p = consPattern();
    std::set<std::string> seen;
    checkLinear(p, seen);
    return p;
  }

  void checkLinear(const Pattern& p, std::set<std::string>& seen) {
    if (p.kind == Pattern::Kind::Var && !seen.insert(p.name).second) {
      throw CompileError(ErrorKind::Parse, p.span,
                         fmt::format("variable '{}' is bound more than once in one pattern", p.name));
    }
    for (const auto& a : p.args) checkLinear(a, seen);
  }

  Pattern consPattern() {
    Pattern head = atomPattern();
    if (peek().isOp("::")) {
      Span s = next().span;
      Pattern c;
      c.kind = Pattern::Kind::Cons;
      c.span = s;
      c.args.push_back(std::move(head));
      c.args.push_back(consPattern());
      return c;
    }
    return head;
  }

  Pattern atomPattern() {
    const Token& t = peek();
    Pattern p;
    p.span = t.span;
    if (t.isOp("_")) {
      next();
      return p;
    }
    if (t.kind == TokenKind::Identifier) {
      next();
      p.kind = Pattern::Kind::Var;
      p.name = t.lexeme;
      return p;
    }
    bool negative = false;
    if (t.isOp("-")) {
      next();
      negative = true;
    }
    const Token& lit = peek();
    if (lit.kind == TokenKind::IntLiteral) {
      next();
      p.kind = Pattern::Kind::Int;
      auto [ptr, ec] = std::from_chars(lit.lexeme.data(), lit.lexeme.data() + lit.lexeme.size(), p.intValue);
      if (ec != std::errc()) throw CompileError(ErrorKind::Parse, lit.span, "integer literal out of range");
      if (negative) p.intValue = -p.intValue;
      return p;
    }
    if (lit.kind == TokenKind::FloatLiteral) {
      next();
      p.kind = Pattern::Kind::Float;
      p.floatValue = std::stod(lit.lexeme) * (negative ? -1 : 1);
      return p;
    }
    if (negative) fail("numeric literal after '-' in pattern");
    if (t.kind == TokenKind::StringLiteral) {
      next();
      p.kind = Pattern::Kind::String;
      p.name = t.lexeme;
      return p;
    }
    if (t.isKeyword("true") || t.isKeyword("false")) {
      next();
      p.kind = Pattern::Kind::Bool;
      p.boolValue = t.lexeme == "true";
      return p;
    }
    if (t.kind == TokenKind::TypeIdentifier) {
      next();
      p.kind = Pattern::Kind::Ctor;
      p.name = t.lexeme;
      if (acceptOp("(")) {
        do {
          p.args.push_back(consPattern());
        } while (acceptOp(","));
        expectOp(")");
      }
      return p;
    }
    if (t.isOp("(")) {
      next();
      if (acceptOp(")")) {
        p.kind = Pattern::Kind::Unit;
        return p;
      }
      Pattern first = consPattern();
      if (acceptOp(")")) return first;
      p.kind = Pattern::Kind::Tuple;
      p.args.push_back(std::move(first));
      while (acceptOp(",")) p.args.push_back(consPattern());
      expectOp(")");
      return p;
    }
    if (t.isOp("[")) {
      next();
      std::vector<Pattern> elems;
      if (!peek().isOp("]")) {
        do {
          elems.push_back(consPattern());
        } while (acceptOp(","));
      }
      expectOp("]");
      // [a, b] is sugar for a :: b :: []
      Pattern tail;
      tail.kind = Pattern::Kind::Nil;
      tail.span = t.span;
      for (auto it = elems.rbegin(); it != elems.rend(); ++it) {
        Pattern c;
        c.kind = Pattern::Kind::Cons;
        c.span = it->span;
        c.args.push_back(std::move(*it));
        c.args.push_back(std::move(tail));
        tail = std::move(c);
      }
      return tail;
    }
    fail("pattern");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

SourceProgram parse(std::span<const Token> tokens) { return Parser(tokens).program(); }

SourceProgram parseSource(std::string_view source, std::uint32_t file) {
  auto tokens = tokenize(source, file);
  return parse(tokens);
}

}  // namespace nvlang::syntax
