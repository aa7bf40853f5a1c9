// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/interpreter.hpp"

#include "webpol/error.hpp"

#include <array>
#include <cmath>

namespace webpol {

std::string_view to_string(Mode mode)
{
    return mode == Mode::Nsu ? "nsu" : "upgrade";
}

std::optional<Mode> parse_mode(std::string_view text)
{
    if (text == "upgrade")
        return Mode::Upgrade;
    if (text == "nsu")
        return Mode::Nsu;
    return std::nullopt;
}

namespace {

using namespace ast;

template<class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

bool is_primitive(Payload const& p)
{
    return std::holds_alternative<Null>(p) || std::holds_alternative<double>(p) || std::holds_alternative<std::string>(p)
        || std::holds_alternative<bool>(p);
}

std::string_view type_name(Payload const& p)
{
    return std::visit(Overloaded {
                          [](Null) { return std::string_view("null"); },
                          [](double) { return std::string_view("number"); },
                          [](std::string const&) { return std::string_view("string"); },
                          [](bool) { return std::string_view("boolean"); },
                          [](Object*) { return std::string_view("object"); },
                          [](HostObject* h) { return h->class_name(); },
                          [](auto const&) { return std::string_view("function"); },
                      },
        p);
}

bool loosely_equal(Payload const& a, Payload const& b)
{
    if (a.index() == b.index()) {
        return std::visit(Overloaded {
                              [](Null, Null) { return true; },
                              [](double x, double y) { return x == y; },
                              [](std::string const& x, std::string const& y) { return x == y; },
                              [](bool x, bool y) { return x == y; },
                              [](Object* x, Object* y) { return x == y; },
                              [](Closure* x, Closure* y) { return x == y; },
                              [](NativeFunction* x, NativeFunction* y) { return x == y; },
                              [](HostObject* x, HostObject* y) { return x == y; },
                              [](BoundMethod const& x, BoundMethod const& y) {
                                  return x.host == y.host && x.text == y.text && x.name == y.name;
                              },
                              [](auto const&, auto const&) { return false; },
                          },
            a, b);
    }
    if (std::holds_alternative<Null>(a) || std::holds_alternative<Null>(b))
        return false;
    if (auto const* x = std::get_if<bool>(&a))
        return loosely_equal(Payload { *x ? 1.0 : 0.0 }, b);
    if (auto const* y = std::get_if<bool>(&b))
        return loosely_equal(a, Payload { *y ? 1.0 : 0.0 });
    bool numeric_a = std::holds_alternative<double>(a);
    bool numeric_b = std::holds_alternative<double>(b);
    if ((numeric_a && std::holds_alternative<std::string>(b)) || (numeric_b && std::holds_alternative<std::string>(a)))
        return to_number(a) == to_number(b);
    return false;
}

Payload binary_payload(BinaryOp op, Payload const& l, Payload const& r)
{
    switch (op) {
    case BinaryOp::Add:
        if (std::holds_alternative<std::string>(l) || std::holds_alternative<std::string>(r) || !is_primitive(l)
            || !is_primitive(r))
            return to_display_string(l) + to_display_string(r);
        return to_number(l) + to_number(r);
    case BinaryOp::Sub:
        return to_number(l) - to_number(r);
    case BinaryOp::Mul:
        return to_number(l) * to_number(r);
    case BinaryOp::Div:
        return to_number(l) / to_number(r);
    case BinaryOp::Mod:
        return std::fmod(to_number(l), to_number(r));
    case BinaryOp::Eq:
        return loosely_equal(l, r);
    case BinaryOp::Ne:
        return !loosely_equal(l, r);
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: {
        auto const* ls = std::get_if<std::string>(&l);
        auto const* rs = std::get_if<std::string>(&r);
        if (ls && rs) {
            auto cmp = ls->compare(*rs);
            switch (op) {
            case BinaryOp::Lt:
                return cmp < 0;
            case BinaryOp::Le:
                return cmp <= 0;
            case BinaryOp::Gt:
                return cmp > 0;
            default:
                return cmp >= 0;
            }
        }
        double x = to_number(l);
        double y = to_number(r);
        switch (op) {
        case BinaryOp::Lt:
            return x < y;
        case BinaryOp::Le:
            return x <= y;
        case BinaryOp::Gt:
            return x > y;
        default:
            return x >= y;
        }
    }
    case BinaryOp::And:
    case BinaryOp::Or:
        break;
    }
    return Null {};
}

// Methods on string receivers. Returned label covers the arguments only;
// the caller joins in the receiver and pc.
TaintedValue string_method(Interpreter& interp, std::string const& text, std::string_view name,
    std::span<TaintedValue const> args)
{
    Label label;
    for (auto const& a : args)
        label = interp.lub(label, a.label);
    auto arg_number = [&](std::size_t i, double fallback) {
        return i < args.size() ? to_number(args[i].payload) : fallback;
    };
    auto clamp_index = [&](double v) {
        if (std::isnan(v) || v < 0)
            return std::size_t { 0 };
        return std::min(text.size(), static_cast<std::size_t>(v));
    };

    if (name == "charAt") {
        double i = arg_number(0, 0);
        if (std::isnan(i) || i < 0 || i >= static_cast<double>(text.size()))
            return make_value(std::string {}, label);
        return make_value(std::string(1, text[static_cast<std::size_t>(i)]), label);
    }
    if (name == "indexOf") {
        auto needle = args.empty() ? std::string("null") : to_display_string(args[0].payload);
        auto pos = text.find(needle);
        return make_value(pos == std::string::npos ? -1.0 : static_cast<double>(pos), label);
    }
    if (name == "substring") {
        auto a = clamp_index(arg_number(0, 0));
        auto b = clamp_index(arg_number(1, static_cast<double>(text.size())));
        if (a > b)
            std::swap(a, b);
        return make_value(text.substr(a, b - a), label);
    }
    if (name == "toUpperCase" || name == "toLowerCase") {
        std::string out = text;
        bool upper = name == "toUpperCase";
        for (auto& c : out) {
            if (upper && c >= 'a' && c <= 'z')
                c = static_cast<char>(c - 'a' + 'A');
            else if (!upper && c >= 'A' && c <= 'Z')
                c = static_cast<char>(c - 'A' + 'a');
        }
        return make_value(std::move(out), label);
    }
    Interpreter::throw_type_error("string has no method '" + std::string(name) + "'");
}

bool is_string_method(std::string_view name)
{
    return name == "charAt" || name == "indexOf" || name == "substring" || name == "toUpperCase"
        || name == "toLowerCase";
}

}

Interpreter::Interpreter(SinkDomain host, InterpreterOptions options)
    : m_host(std::move(host))
    , m_options(options)
    , m_globals(std::make_unique<Environment>())
{
    m_globals->mark_captured();
}

Interpreter::~Interpreter() = default;

void Interpreter::throw_type_error(std::string message)
{
    throw Error(ErrorKind::TypeError, std::move(message));
}

Object* Interpreter::new_object()
{
    return m_objects.emplace_back(std::make_unique<Object>()).get();
}

NativeFunction* Interpreter::new_native(std::string name, NativeFn fn)
{
    return m_natives.emplace_back(std::make_unique<NativeFunction>(NativeFunction { std::move(name), std::move(fn) }))
        .get();
}

void Interpreter::define_native(std::string name, NativeFn fn)
{
    auto* native = new_native(name, std::move(fn));
    m_globals->declare(std::move(name), make_value(native));
}

void Interpreter::step()
{
    if (++m_steps > m_options.step_budget)
        throw Error(ErrorKind::ResourceLimit, "step budget exhausted");
}

void Interpreter::report_operation(std::string_view op, std::span<Label const> operands, Label const& result)
{
    if (m_observer)
        m_observer->on_operation(op, operands, result);
}

void Interpreter::run_program(Program const& program, bool privileged, SinkDomain const& origin)
{
    struct Restore {
        ExecContext& ctx;
        bool privileged;
        std::optional<SinkDomain> origin;
        ~Restore()
        {
            ctx.privileged = privileged;
            ctx.origin = std::move(origin);
        }
    } restore { m_context, m_context.privileged, m_context.origin };

    m_context.privileged = privileged;
    m_context.origin = origin;
    hoist(program.stmts, *m_globals);
    for (auto const& stmt : program.stmts) {
        exec(*stmt, *m_globals);
        if (m_observer)
            m_observer->on_top_level_statement(m_context.pc);
    }
}

void Interpreter::hoist(std::vector<StmtPtr> const& stmts, Environment& env)
{
    for (auto const& stmt : stmts) {
        if (auto const* decl = std::get_if<FunctionDecl>(&stmt->node))
            declare(env, decl->fn->name, make_closure(decl->fn, env));
    }
}

void Interpreter::declare(Environment& env, std::string const& name, TaintedValue value)
{
    if (auto* existing = env.find_local(name)) {
        write_slot(*existing, std::move(value), {}, name);
        return;
    }
    env.declare(name, make_stored(std::move(value), {}, name));
}

TaintedValue Interpreter::make_closure(FunctionRef fn, Environment& env)
{
    env.mark_captured();
    auto* closure = m_closures.emplace_back(std::make_unique<Closure>(Closure { std::move(fn), &env, m_context.privileged }))
                        .get();
    return make_value(closure, pc());
}

void Interpreter::write_slot(TaintedValue& slot, TaintedValue value, Label const& extra_context, std::string_view target)
{
    auto context = lub(pc(), extra_context);
    if (tracking() && m_options.mode == Mode::Nsu && !leq(context, slot.label)) {
        throw Error(ErrorKind::ImplicitFlowError,
            "write to '" + std::string(target) + "' labeled " + slot.label.to_string() + " under context "
                + context.to_string());
    }
    value.label = lub(value.label, context);
    if (m_observer)
        m_observer->on_write(target, context, value.label, m_context.privileged);
    slot = std::move(value);
}

TaintedValue Interpreter::make_stored(TaintedValue value, Label const& extra_context, std::string_view target)
{
    auto context = lub(pc(), extra_context);
    value.label = lub(value.label, context);
    if (m_observer)
        m_observer->on_write(target, context, value.label, m_context.privileged);
    return value;
}

void Interpreter::retain_if_captured(std::unique_ptr<Environment>& env)
{
    if (env && env->captured())
        m_retained_envs.push_back(std::move(env));
}

Interpreter::Completion Interpreter::exec_statements(std::vector<StmtPtr> const& stmts, Environment& env)
{
    hoist(stmts, env);
    for (auto const& stmt : stmts) {
        auto completion = exec(*stmt, env);
        if (completion.returned)
            return completion;
    }
    return {};
}

Interpreter::Completion Interpreter::exec_block(Block const& block, Environment& parent)
{
    auto env = std::make_unique<Environment>(&parent);
    struct Retain {
        Interpreter& interp;
        std::unique_ptr<Environment>& env;
        ~Retain() { interp.retain_if_captured(env); }
    } retain { *this, env };
    return exec_statements(block.stmts, *env);
}

Interpreter::Completion Interpreter::exec(Stmt const& stmt, Environment& env)
{
    step();
    try {
        return std::visit(
            Overloaded {
                [&](VarDecl const& v) -> Completion {
                    declare(env, v.name, evaluate(*v.init, env));
                    return {};
                },
                [&](Assign const& a) -> Completion {
                    assign(a, env);
                    return {};
                },
                [&](If const& i) -> Completion {
                    auto cond = evaluate(*i.cond, env);
                    Completion completion;
                    {
                        PcScope scope(m_context.pc, tracking() ? cond.label : Label {}, FrameOrigin::Branch);
                        if (truthy(cond.payload))
                            completion = exec_block(i.then_block, env);
                        else if (i.else_block)
                            completion = exec_block(*i.else_block, env);
                    }
                    if (completion.returned)
                        return completion;
                    // Reaching the code after a branch that could have returned
                    // depends on the condition: keep it in the pc until the
                    // enclosing call returns.
                    if (i.may_return && m_call_depth > 0 && tracking())
                        m_context.pc.push(cond.label, FrameOrigin::Branch);
                    return {};
                },
                [&](While const& w) -> Completion {
                    Label seen;
                    while (true) {
                        auto cond = evaluate(*w.cond, env);
                        seen = lub(seen, cond.label);
                        if (!truthy(cond.payload))
                            break;
                        PcScope scope(m_context.pc, tracking() ? cond.label : Label {}, FrameOrigin::Loop);
                        auto completion = exec_block(w.body, env);
                        if (completion.returned)
                            return completion;
                    }
                    if (w.may_return && m_call_depth > 0 && tracking())
                        m_context.pc.push(seen, FrameOrigin::Loop);
                    return {};
                },
                [&](FunctionDecl const&) -> Completion { return {}; },
                [&](Return const& r) -> Completion {
                    auto value = r.value ? evaluate(*r.value, env) : make_value(Null {}, pc());
                    value.label = lub(value.label, pc());
                    return { true, std::move(value) };
                },
                [&](ExprStmt const& e) -> Completion {
                    evaluate(*e.expr, env);
                    return {};
                },
                [&](BlockStmt const& b) -> Completion { return exec_block(b.block, env); },
            },
            stmt.node);
    } catch (Error& e) {
        e.set_span_if_unknown(stmt.span);
        throw;
    }
}

void Interpreter::assign(Assign const& a, Environment& env)
{
    auto const& target = *a.target;
    if (auto const* id = std::get_if<Ident>(&target.node)) {
        auto value = evaluate(*a.value, env);
        auto* slot = env.lookup(id->name);
        if (!slot)
            throw Error(ErrorKind::UndefinedVariable, "assignment to undeclared variable '" + id->name + "'", target.span);
        write_slot(*slot, std::move(value), {}, id->name);
        return;
    }
    if (auto const* m = std::get_if<Member>(&target.node)) {
        auto object = evaluate(*m->object, env);
        auto value = evaluate(*a.value, env);
        set_field(object, m->name, std::move(value), object.label);
        return;
    }
    auto const& ix = std::get<Index>(target.node);
    auto object = evaluate(*ix.object, env);
    auto key = evaluate(*ix.key, env);
    auto value = evaluate(*a.value, env);
    set_field(object, to_display_string(key.payload), std::move(value), lub(object.label, key.label));
}

void Interpreter::set_field(TaintedValue const& object, std::string_view name, TaintedValue value, Label const& extra)
{
    if (auto* const* obj = std::get_if<Object*>(&object.payload)) {
        auto& fields = (*obj)->fields;
        if (auto it = fields.find(name); it != fields.end()) {
            write_slot(it->second, std::move(value), extra, name);
            return;
        }
        // A new field reveals the context it was created in.
        auto context = lub(pc(), extra);
        if (tracking() && m_options.mode == Mode::Nsu && !leq(context, (*obj)->shape)) {
            throw Error(ErrorKind::ImplicitFlowError,
                "creating field '" + std::string(name) + "' on object shaped " + (*obj)->shape.to_string()
                    + " under context " + context.to_string());
        }
        (*obj)->shape = lub((*obj)->shape, context);
        fields.emplace(std::string(name), make_stored(std::move(value), extra, name));
        return;
    }
    if (auto* const* host = std::get_if<HostObject*>(&object.payload)) {
        (*host)->set_member(*this, name, std::move(value), extra);
        return;
    }
    throw_type_error("cannot set property '" + std::string(name) + "' of " + std::string(type_name(object.payload)));
}

TaintedValue Interpreter::evaluate(Expr const& expr, Environment& env)
{
    step();
    try {
        return std::visit(
            Overloaded {
                [&](NumberLit const& n) { return make_value(n.value, pc()); },
                [&](StringLit const& s) { return make_value(s.value, pc()); },
                [&](BoolLit const& b) { return make_value(b.value, pc()); },
                [&](NullLit const&) { return make_value(Null {}, pc()); },
                [&](Ident const& id) {
                    auto const* slot = env.lookup(id.name);
                    if (!slot)
                        throw Error(ErrorKind::UndefinedVariable, "undefined variable '" + id.name + "'", expr.span);
                    return make_value(slot->payload, lub(slot->label, pc()));
                },
                [&](Binary const& b) { return eval_binary(b, env); },
                [&](Unary const& u) {
                    auto operand = evaluate(*u.operand, env);
                    Payload result = u.op == UnaryOp::Not ? Payload { !truthy(operand.payload) }
                                                          : Payload { -to_number(operand.payload) };
                    auto label = lub(operand.label, pc());
                    report_operation(to_string(u.op), std::array { operand.label }, label);
                    return make_value(std::move(result), std::move(label));
                },
                [&](Call const& c) {
                    auto callee = evaluate(*c.callee, env);
                    std::vector<TaintedValue> args;
                    args.reserve(c.args.size());
                    for (auto const& arg : c.args)
                        args.push_back(evaluate(*arg, env));
                    return call(callee, args, expr.span);
                },
                [&](Member const& m) {
                    auto object = evaluate(*m.object, env);
                    auto result = get_member(object, m.name);
                    report_operation(".", std::array { object.label }, result.label);
                    return result;
                },
                [&](Index const& ix) {
                    auto object = evaluate(*ix.object, env);
                    auto key = evaluate(*ix.key, env);
                    auto result = get_index(object, key);
                    report_operation("[]", std::array { object.label, key.label }, result.label);
                    return result;
                },
                [&](FunctionExpr const& f) { return make_closure(f.fn, env); },
                [&](ObjectLit const& o) {
                    auto* object = new_object();
                    object->shape = pc();
                    for (auto const& [key, value_expr] : o.fields) {
                        auto value = evaluate(*value_expr, env);
                        value.label = lub(value.label, pc());
                        object->fields.insert_or_assign(key, std::move(value));
                    }
                    return make_value(object, pc());
                },
            },
            expr.node);
    } catch (Error& e) {
        e.set_span_if_unknown(expr.span);
        throw;
    }
}

TaintedValue Interpreter::eval_binary(Binary const& bin, Environment& env)
{
    auto lhs = evaluate(*bin.lhs, env);
    if (bin.op == BinaryOp::And || bin.op == BinaryOp::Or) {
        bool short_circuit = (bin.op == BinaryOp::And) != truthy(lhs.payload);
        if (short_circuit) {
            auto label = lub(lhs.label, pc());
            report_operation(to_string(bin.op), std::array { lhs.label }, label);
            return make_value(std::move(lhs.payload), std::move(label));
        }
        auto rhs = evaluate(*bin.rhs, env);
        auto label = lub(lub(lhs.label, rhs.label), pc());
        report_operation(to_string(bin.op), std::array { lhs.label, rhs.label }, label);
        return make_value(std::move(rhs.payload), std::move(label));
    }
    auto rhs = evaluate(*bin.rhs, env);
    auto label = lub(lub(lhs.label, rhs.label), pc());
    report_operation(to_string(bin.op), std::array { lhs.label, rhs.label }, label);
    return make_value(binary_payload(bin.op, lhs.payload, rhs.payload), std::move(label));
}

TaintedValue Interpreter::get_member(TaintedValue const& object, std::string_view name)
{
    if (auto* const* obj = std::get_if<Object*>(&object.payload)) {
        auto const& fields = (*obj)->fields;
        if (auto it = fields.find(name); it != fields.end())
            return make_value(it->second.payload, lub(lub(object.label, it->second.label), pc()));
        return make_value(Null {}, lub(lub(object.label, (*obj)->shape), pc()));
    }
    if (auto* const* host = std::get_if<HostObject*>(&object.payload)) {
        auto result = (*host)->get_member(*this, name, object.label);
        result.label = lub(lub(result.label, object.label), pc());
        return result;
    }
    if (auto const* text = std::get_if<std::string>(&object.payload)) {
        auto label = lub(object.label, pc());
        if (name == "length")
            return make_value(static_cast<double>(text->size()), label);
        if (is_string_method(name))
            return make_value(BoundMethod { nullptr, *text, std::string(name) }, label);
        return make_value(Null {}, label);
    }
    throw_type_error("cannot read property '" + std::string(name) + "' of " + std::string(type_name(object.payload)));
}

TaintedValue Interpreter::get_index(TaintedValue const& object, TaintedValue const& key)
{
    auto base = lub(object.label, key.label);
    if (std::holds_alternative<Object*>(object.payload) || std::holds_alternative<HostObject*>(object.payload)) {
        auto result = get_member(object, to_display_string(key.payload));
        result.label = lub(result.label, base);
        return result;
    }
    if (auto const* text = std::get_if<std::string>(&object.payload)) {
        auto label = lub(base, pc());
        if (auto const* n = std::get_if<double>(&key.payload)) {
            if (*n >= 0 && *n < static_cast<double>(text->size()) && std::floor(*n) == *n)
                return make_value(std::string(1, (*text)[static_cast<std::size_t>(*n)]), label);
            return make_value(Null {}, label);
        }
        auto result = get_member(object, to_display_string(key.payload));
        result.label = lub(result.label, base);
        return result;
    }
    throw_type_error("cannot index " + std::string(type_name(object.payload)));
}

TaintedValue Interpreter::call(TaintedValue const& callee, std::span<TaintedValue const> args, SourceSpan span)
{
    try {
        if (auto* const* closure = std::get_if<Closure*>(&callee.payload))
            return call_closure(**closure, callee.label, args);

        TaintedValue result;
        if (auto* const* native = std::get_if<NativeFunction*>(&callee.payload)) {
            result = (*native)->fn(*this, args);
        } else if (auto const* method = std::get_if<BoundMethod>(&callee.payload)) {
            result = method->host ? method->host->call_method(*this, method->name, args, callee.label)
                                  : string_method(*this, method->text, method->name, args);
        } else {
            throw_type_error(std::string(type_name(callee.payload)) + " is not a function");
        }
        auto label = lub(lub(result.label, callee.label), pc());
        std::vector<Label> operands { callee.label };
        for (auto const& a : args)
            operands.push_back(a.label);
        report_operation("call", operands, label);
        result.label = std::move(label);
        return result;
    } catch (Error& e) {
        e.set_span_if_unknown(span);
        throw;
    }
}

TaintedValue Interpreter::call_closure(Closure const& closure, Label const& callee_label, std::span<TaintedValue const> args)
{
    if (m_call_depth >= m_options.max_call_depth)
        throw Error(ErrorKind::ResourceLimit, "maximum call depth exceeded");

    struct CallGuard {
        Interpreter& interp;
        bool privileged;
        ~CallGuard()
        {
            --interp.m_call_depth;
            interp.m_context.privileged = privileged;
        }
    };

    TaintedValue result;
    {
        ++m_call_depth;
        CallGuard guard { *this, m_context.privileged };
        // A function chosen under a secret context runs in that context.
        PcScope scope(m_context.pc, tracking() ? callee_label : Label {}, FrameOrigin::Branch);

        auto env = std::make_unique<Environment>(closure.env);
        struct Retain {
            Interpreter& interp;
            std::unique_ptr<Environment>& env;
            ~Retain() { interp.retain_if_captured(env); }
        } retain { *this, env };

        auto const& params = closure.fn->params;
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto value = i < args.size() ? args[i] : make_value(Null {}, pc());
            env->declare(params[i], make_stored(std::move(value), {}, params[i]));
        }

        m_context.privileged = closure.privileged;
        auto completion = exec_statements(closure.fn->body.stmts, *env);
        result = completion.returned ? std::move(completion.value) : make_value(Null {}, pc());
    }
    result.label = lub(lub(result.label, callee_label), pc());
    return result;
}

}
