#include <doctest.h>

#include <functional>

#include "cocofj/contextual.hpp"
#include "test_fixtures.hpp"

using namespace cocofj;

namespace {

ProgramPtr parsed(const std::string& source) {
    ParseResult r = parseProgram(source);
    REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? "" : r.errors[0].message));
    return r.program;
}

ClassTable tableOf(const std::string& source) {
    ClassTableResult r = buildClassTable(parsed(source));
    REQUIRE(r.ok());
    return r.table;
}

std::optional<ClassName> typeOf(const TypingContext& gamma, const ClassTable& table,
                                const std::string& text) {
    ParseResult r = parseExpr(text);
    REQUIRE(r.ok());
    std::vector<Diagnostic> errors;
    return checkExpr(gamma, table, *r.expr, errors);
}

// ---------------------------------------------------------------------------
// Independent rule interpreter: premise-by-premise transliteration of the
// declarative typing rules, working on the raw declaration list.

struct NaiveWorld {
    std::vector<ClassDeclPtr> decls;

    const ClassDecl* find(const ClassName& c) const {
        for (const ClassDeclPtr& d : decls)
            if (d->name == c)
                return d.get();
        return nullptr;
    }

    bool sub(ClassName c, const ClassName& d) const {
        for (;;) {
            if (c == d)
                return true;
            const ClassDecl* decl = find(c);
            if (!decl)
                return false;
            c = decl->superName;
        }
    }

    std::optional<std::vector<ClassName>> fieldsOf(const ClassName& c) const {
        if (c == "Object")
            return std::vector<ClassName>{};
        const ClassDecl* decl = find(c);
        if (!decl)
            return std::nullopt;
        auto upper = fieldsOf(decl->superName);
        if (!upper)
            return std::nullopt;
        for (const Param& f : decl->fields)
            upper->push_back(f.type);
        return upper;
    }

    std::optional<MethodSig> mtype(const std::string& m, ClassName c) const {
        while (const ClassDecl* decl = find(c)) {
            for (const MethodDecl& method : decl->methods)
                if (method.name == m) {
                    MethodSig sig;
                    for (const Param& p : method.params)
                        sig.params.push_back(p.type);
                    sig.ret = method.returnType;
                    return sig;
                }
            c = decl->superName;
        }
        return std::nullopt;
    }

    std::optional<ClassName> type(const TypingContext& gamma, const Expr& e) const {
        auto all = [this, &gamma](const std::vector<ExprPtr>& args,
                                  const std::vector<ClassName>& want) {
            if (args.size() != want.size())
                return false;
            for (size_t i = 0; i < args.size(); ++i) {
                auto t = type(gamma, *args[i]);
                if (!t || !sub(*t, want[i]))
                    return false;
            }
            return true;
        };
        switch (e.kind) {
        case ExprKind::Var: {
            auto it = gamma.find(e.name);
            return it == gamma.end() ? std::nullopt : std::optional(it->second);
        }
        case ExprKind::This: {
            auto it = gamma.find("this");
            return it == gamma.end() ? std::nullopt : std::optional(it->second);
        }
        case ExprKind::FieldAccess: {
            auto recv = type(gamma, *e.receiver);
            if (!recv)
                return std::nullopt;
            ClassName at = *recv;
            while (const ClassDecl* decl = find(at)) {
                for (const Param& f : decl->fields)
                    if (f.name == e.name)
                        return f.type;
                at = decl->superName;
            }
            return std::nullopt;
        }
        case ExprKind::Invoke: {
            auto recv = type(gamma, *e.receiver);
            if (!recv)
                return std::nullopt;
            auto sig = mtype(e.name, *recv);
            if (!sig || !all(e.args, sig->params))
                return std::nullopt;
            return sig->ret;
        }
        case ExprKind::New: {
            auto want = fieldsOf(e.name);
            if (!want || !all(e.args, *want))
                return std::nullopt;
            return e.name;
        }
        case ExprKind::UCast: {
            auto from = type(gamma, *e.receiver);
            if (!from || !sub(*from, e.name))
                return std::nullopt;
            return e.name;
        }
        case ExprKind::DCast: {
            auto from = type(gamma, *e.receiver);
            if (!from || e.name == *from || !sub(e.name, *from))
                return std::nullopt;
            return e.name;
        }
        case ExprKind::SCast: {
            auto from = type(gamma, *e.receiver);
            if (!from || sub(e.name, *from) || sub(*from, e.name))
                return std::nullopt;
            return e.name;
        }
        }
        return std::nullopt;
    }
};

} // namespace

TEST_CASE("variables type from the context alone") {
    ClassTable empty;
    CHECK(typeOf({{"x", "C"}}, empty, "x") == ClassName("C"));

    std::vector<Diagnostic> errors;
    ParseResult r = parseExpr("x");
    REQUIRE(r.ok());
    CHECK(checkExpr({}, empty, *r.expr, errors) == std::nullopt);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].rule == "T-Var");
    CHECK(errors[0].message.find("unbound") != std::string::npos);
}

TEST_CASE("the running list example types to Int") {
    ClassTable table = tableOf(fixtures::kCore);
    CHECK(typeOf({}, table, "new List().add(succ(0)).size()") == ClassName("Int"));
}

TEST_CASE("cast rules check their side conditions") {
    ClassTable table = tableOf(fixtures::kCore);
    CHECK(typeOf({}, table, "(List)! new Object()") == ClassName("List"));
    CHECK(typeOf({}, table, "(Int) new Succ(new Zero())") == ClassName("Int"));
    CHECK(typeOf({}, table, "(List)? new Succ(new Zero())") == ClassName("List"));

    // Upcast to an unrelated class.
    CHECK(typeOf({}, table, "(List) new Zero()") == std::nullopt);
    // Downcast must be proper.
    CHECK(typeOf({}, table, "(Nat)! new Nat()") == std::nullopt);
    // Stupid cast to a related class.
    CHECK(typeOf({}, table, "(Nat)? new Succ(new Zero())") == std::nullopt);
}

TEST_CASE("invocation and instantiation enforce arity and subtyping") {
    ClassTable table = tableOf(fixtures::kCore);
    CHECK(typeOf({}, table, "new LinkedList().add(0)") == ClassName("List"));
    CHECK(typeOf({}, table, "new Succ(new Zero()).val") == ClassName("Nat"));
    CHECK(typeOf({}, table, "new List().add()") == std::nullopt);
    CHECK(typeOf({}, table, "new List().add(new List())") == std::nullopt);
    CHECK(typeOf({}, table, "new Succ()") == std::nullopt);
    CHECK(typeOf({}, table, "new Ghost()") == std::nullopt);
    CHECK(typeOf({}, table, "new Zero().missing") == std::nullopt);
    CHECK(typeOf({}, table, "new Zero().frobnicate()") == std::nullopt);
}

TEST_CASE("method checks enforce return subtyping and override compatibility") {
    ClassTable table = tableOf(fixtures::kCore);

    SUBCASE("the fixture methods all pass") {
        std::vector<Diagnostic> errors;
        for (const ClassName& cls : table.classNames())
            for (const MethodDecl& m : table.declOf(cls)->methods)
                CHECK(checkMethod(cls, table, m, errors));
        CHECK(errors.empty());
    }
    SUBCASE("override with a changed return type is rejected") {
        ClassTable bad = tableOf(
            "class A extends Object { A() { super(); } A id() { return this; } }\n"
            "class B extends A { B() { super(); } Object id() { return this; } }\n");
        std::vector<Diagnostic> errors;
        CHECK_FALSE(checkMethod("B", bad, bad.declOf("B")->methods[0], errors));
        REQUIRE_FALSE(errors.empty());
        CHECK(errors[0].message.find("override") != std::string::npos);
    }
    SUBCASE("body typing a strict supertype of the declared return is rejected") {
        ClassTable bad = tableOf(
            "class A extends Object { A() { super(); } }\n"
            "class B extends A { B() { super(); } }\n"
            "class M extends Object { M() { super(); } B get() { return new A(); } }\n");
        std::vector<Diagnostic> errors;
        CHECK_FALSE(checkMethod("M", bad, bad.declOf("M")->methods[0], errors));
        REQUIRE(errors.size() == 1);
        CHECK(errors[0].rule == "T-Method");
    }
}

TEST_CASE("program verdicts") {
    SUBCASE("the full fixture program is accepted") {
        Verdict v = checkProgram(parsed(fixtures::kCore));
        CHECK(v.accepted);
        CHECK(v.errors.empty());
    }
    SUBCASE("the empty program is accepted") {
        CHECK(checkProgram(parsed("")).accepted);
    }
    SUBCASE("a constructor omitting an inherited field is rejected") {
        Verdict v = checkProgram(parsed(
            "class A extends Object { Object x; A(Object x) { super(); this.x = x; } }\n"
            "class B extends A { B() { super(); } }\n"));
        REQUIRE_FALSE(v.accepted);
        CHECK(v.errors[0].rule == "T-Class");
    }
    SUBCASE("errors are collected across classes") {
        Verdict v = checkProgram(parsed(
            "class A extends Object { A() { super(); } A bad() { return new Ghost(); } }\n"
            "class B extends Object { B() { super(); } B alsoBad() { return z; } }\n"));
        REQUIRE_FALSE(v.accepted);
        CHECK(v.errors.size() == 2);
    }
    SUBCASE("verdicts are deterministic") {
        const char* src =
            "class A extends Object { A() { super(); } A bad() { return new Ghost(); } }";
        Verdict a = checkProgram(parsed(src));
        Verdict b = checkProgram(parsed(src));
        REQUIRE(a.errors.size() == b.errors.size());
        for (size_t i = 0; i < a.errors.size(); ++i) {
            CHECK(a.errors[i].message == b.errors[i].message);
            CHECK(a.errors[i].rule == b.errors[i].rule);
        }
    }
}

TEST_CASE("exhaustive small expressions agree with the naive rule interpreter") {
    const char* src = R"(
class A extends Object {
  Object f;
  A(Object f) { super(); this.f = f; }
  A m(A a) { return a; }
}
class B extends A {
  B(Object f) { super(f); }
  A m(A a) { return this.m(a); }
}
class C extends Object {
  C() { super(); }
  Object g() { return new A(new C()); }
}
)";
    ProgramPtr program = parsed(src);
    ClassTableResult built = buildClassTable(program);
    REQUIRE(built.ok());
    REQUIRE(checkProgram(program).accepted);

    NaiveWorld world{leaves(program)};
    TypingContext gamma{{"x", "A"}, {"y", "C"}, {"this", "B"}};

    std::vector<ExprPtr> tier{makeVar("x"), makeVar("y"), makeThis(),
                              makeNew("C", {})};
    size_t compared = 0;
    auto compare = [&](const ExprPtr& e) {
        std::vector<Diagnostic> errors;
        std::optional<ClassName> fast = checkExpr(gamma, built.table, *e, errors);
        std::optional<ClassName> slow = world.type(gamma, *e);
        CAPTURE(render(*e));
        CHECK(fast == slow);
        CHECK(errors.size() == (fast ? 0u : 1u));
        ++compared;
    };
    for (const ExprPtr& e : tier)
        compare(e);

    for (int depth = 2; depth <= 3; ++depth) {
        std::vector<ExprPtr> next = tier;
        for (const ExprPtr& e : tier) {
            next.push_back(makeFieldAccess(e, "f"));
            next.push_back(makeFieldAccess(e, "g"));
            next.push_back(makeInvoke(e, "m", {}));
            next.push_back(makeInvoke(e, "g", {}));
            for (const ExprPtr& arg : tier)
                next.push_back(makeInvoke(e, "m", {arg}));
            next.push_back(makeNew("A", {e}));
            next.push_back(makeNew("B", {e}));
            for (ExprKind k : {ExprKind::UCast, ExprKind::DCast, ExprKind::SCast})
                for (const char* cls : {"A", "B", "C"})
                    next.push_back(makeCast(k, cls, e));
        }
        for (size_t i = tier.size(); i < next.size(); ++i)
            compare(next[i]);
        tier = std::move(next);
    }
    CHECK(compared > 5000);
}
