// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_INTERPRETER_HPP
#define WEBPOL_INTERPRETER_HPP

#include "webpol/ast.hpp"
#include "webpol/environment.hpp"
#include "webpol/pc_stack.hpp"
#include "webpol/value.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace webpol {

enum class Mode : std::uint8_t {
    // Writes are labeled join(value, pc).
    Upgrade,
    // No-sensitive-upgrade: a write under pc fails unless pc <= slot label.
    Nsu,
};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

struct ExecContext {
    bool privileged = false;
    std::optional<SinkDomain> origin;
    PcStack pc;
    bool page_loading = true;
};

/// Instrumentation hooks. Default implementations ignore everything.
class ExecutionObserver {
public:
    virtual ~ExecutionObserver() = default;

    virtual void on_operation(std::string_view /*op*/, std::span<Label const> /*operands*/, Label const& /*result*/) { }
    virtual void on_write(std::string_view /*target*/, Label const& /*context*/, Label const& /*stored*/,
        bool /*privileged*/)
    {
    }
    virtual void on_top_level_statement(PcStack const&) { }
    // Called by the browser before each event handler runs.
    virtual void on_handler_entry(std::uint64_t /*event_seq*/, bool /*privileged*/) { }
};

struct InterpreterOptions {
    Mode mode = Mode::Upgrade;
    // When false every label is public: plain interpretation, used as a timing baseline.
    bool track_labels = true;
    std::uint64_t step_budget = 5'000'000;
    int max_call_depth = 200;
};

class Interpreter {
public:
    explicit Interpreter(SinkDomain host, InterpreterOptions options = {});
    ~Interpreter();

    Interpreter(Interpreter const&) = delete;
    Interpreter& operator=(Interpreter const&) = delete;

    SinkDomain const& host() const { return m_host; }
    Mode mode() const { return m_options.mode; }
    bool tracking() const { return m_options.track_labels; }

    ExecContext& context() { return m_context; }
    ExecContext const& context() const { return m_context; }
    Environment& globals() { return *m_globals; }

    Label pc() const { return tracking() ? m_context.pc.current() : Label {}; }
    Label lub(Label const& a, Label const& b) const { return tracking() ? join(a, b) : Label {}; }

    void set_observer(ExecutionObserver* observer) { m_observer = observer; }
    ExecutionObserver* observer() const { return m_observer; }

    Object* new_object();
    NativeFunction* new_native(std::string name, NativeFn fn);
    void define_native(std::string name, NativeFn fn);

    /// Runs top-level statements in the global scope.
    void run_program(ast::Program const& program, bool privileged, SinkDomain const& origin);

    /// Invokes any callable value. Result label joins the callee's label and pc.
    TaintedValue call(TaintedValue const& callee, std::span<TaintedValue const> args, SourceSpan span = {});

    TaintedValue evaluate(ast::Expr const& expr, Environment& env);

    /// Overwrites an existing slot under the current pc joined with `extra_context`.
    /// In nsu mode throws ImplicitFlowError unless that context flows to the slot's label.
    void write_slot(TaintedValue& slot, TaintedValue value, Label const& extra_context, std::string_view target);

    /// Labels a value for storage in a fresh slot: join(value, pc, extra_context).
    TaintedValue make_stored(TaintedValue value, Label const& extra_context, std::string_view target);

    void reset_budget() { m_steps = 0; }

    [[noreturn]] static void throw_type_error(std::string message);

private:
    struct Completion {
        bool returned = false;
        TaintedValue value;
    };

    Completion exec(ast::Stmt const& stmt, Environment& env);
    Completion exec_statements(std::vector<ast::StmtPtr> const& stmts, Environment& env);
    Completion exec_block(ast::Block const& block, Environment& parent);
    void hoist(std::vector<ast::StmtPtr> const& stmts, Environment& env);
    void declare(Environment& env, std::string const& name, TaintedValue value);
    void assign(ast::Assign const& assign, Environment& env);

    TaintedValue eval_binary(ast::Binary const& bin, Environment& env);
    TaintedValue get_member(TaintedValue const& object, std::string_view name);
    TaintedValue get_index(TaintedValue const& object, TaintedValue const& key);
    void set_field(TaintedValue const& object, std::string_view name, TaintedValue value, Label const& extra);
    TaintedValue call_closure(Closure const& closure, Label const& callee_label, std::span<TaintedValue const> args);
    TaintedValue make_closure(ast::FunctionRef fn, Environment& env);
    void retain_if_captured(std::unique_ptr<Environment>& env);

    void step();
    void report_operation(std::string_view op, std::span<Label const> operands, Label const& result);

    SinkDomain m_host;
    InterpreterOptions m_options;
    ExecContext m_context;
    std::unique_ptr<Environment> m_globals;
    ExecutionObserver* m_observer = nullptr;

    std::vector<std::unique_ptr<Object>> m_objects;
    std::vector<std::unique_ptr<Closure>> m_closures;
    std::vector<std::unique_ptr<NativeFunction>> m_natives;
    std::vector<std::unique_ptr<Environment>> m_retained_envs;

    std::uint64_t m_steps = 0;
    int m_call_depth = 0;
};

}

#endif
