// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#ifndef WEBPOL_BROWSER_HPP
#define WEBPOL_BROWSER_HPP

#include "webpol/error.hpp"
#include "webpol/interpreter.hpp"
#include "webpol/net.hpp"

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace webpol {

class Page;

struct HandlerRegistration {
    std::string event_type;
    TaintedValue callback;
    bool privileged = false;
    std::uint64_t seq = 0;
    // pc at registration joined with the callback and reference labels;
    // the handler body runs under it.
    Label label;
};

class Element final : public HostObject {
public:
    Element(Page& page, std::string tag, std::optional<std::string> id)
        : m_page(page)
        , tag(std::move(tag))
        , id(std::move(id))
    {
    }

    std::string_view class_name() const override { return "Element"; }
    TaintedValue get_member(Interpreter&, std::string_view name, Label const& ref_label) override;
    void set_member(Interpreter&, std::string_view name, TaintedValue value, Label const& ref_label) override;
    TaintedValue call_method(Interpreter&, std::string_view name, std::span<TaintedValue const> args,
        Label const& ref_label) override;

    // Value or attribute read with the element floor joined in.
    TaintedValue read_value(Interpreter&) const;
    TaintedValue read_attribute(Interpreter&, std::string_view name) const;

    void write_value(Interpreter&, TaintedValue value, Label const& ref_label);
    void write_attribute(Interpreter&, std::string_view name, TaintedValue value, Label const& ref_label);
    void append_child(Interpreter&, Element& child);
    void remove_child(Interpreter&, Element& child);

    bool subtree_protected() const;
    bool is_ancestor_of(Element const& other) const;
    bool attached() const;
    std::string describe() const;

private:
    Page& m_page;

public:
    std::string tag;
    std::optional<std::string> id;
    std::map<std::string, TaintedValue, std::less<>> attributes;
    TaintedValue value { std::string {}, {} };
    std::vector<Element*> children;
    Element* parent = nullptr;
    Label element_label;
    std::vector<HandlerRegistration> handlers;
    bool is_protected = false;
    bool hidden = false; // the network-receive target is never dumped
};

class Event final : public HostObject {
public:
    explicit Event(Page& page)
        : m_page(page)
    {
    }

    std::string_view class_name() const override { return "Event"; }
    TaintedValue get_member(Interpreter&, std::string_view name, Label const& ref_label) override;
    void set_member(Interpreter&, std::string_view name, TaintedValue value, Label const& ref_label) override;
    TaintedValue call_method(Interpreter&, std::string_view name, std::span<TaintedValue const> args,
        Label const& ref_label) override;

private:
    Page& m_page;

public:
    std::string type;
    Element* target = nullptr;
    std::map<std::string, TaintedValue, std::less<>> data;
    Label event_label;
    Label context_label;
    std::uint64_t seq = 0;
};

class Document final : public HostObject {
public:
    explicit Document(Page& page)
        : m_page(page)
    {
    }

    std::string_view class_name() const override { return "Document"; }
    TaintedValue get_member(Interpreter&, std::string_view name, Label const& ref_label) override;
    void set_member(Interpreter&, std::string_view name, TaintedValue value, Label const& ref_label) override;
    TaintedValue call_method(Interpreter&, std::string_view name, std::span<TaintedValue const> args,
        Label const& ref_label) override;

private:
    Page& m_page;
};

struct HandlerLogEntry {
    std::uint64_t event_seq = 0;
    std::string event_type;
    std::string target; // element id, or "#network"
    std::string handler;
    std::uint64_t registration_seq = 0;
    bool privileged = false;
    Label pc_at_entry;
    Label event_label;
    Label context_label;
    std::string outcome; // "ok" or the error kind
};

struct ScriptLogEntry {
    std::string name;
    std::string origin;
    bool policy = false;
    std::string outcome;
};

struct ErrorRecord {
    ErrorKind kind;
    std::string where; // script name or "handler <seq> (<event>)"
    SourceSpan span;
    std::string message;
};

struct PageOptions {
    Mode mode = Mode::Upgrade;
    bool track_labels = true;
    bool force_block_all = false;
    std::uint64_t step_budget = 5'000'000;
};

struct EventInput {
    std::string type;
    std::string target_id;
    std::map<std::string, Payload, std::less<>> data;
};

/// One simulated browser tab: DOM, handler registry, interpreter, network gate.
class Page {
public:
    Page(SinkDomain host, PageOptions options, std::vector<CannedResponse> responses = {});
    ~Page();

    Page(Page const&) = delete;
    Page& operator=(Page const&) = delete;

    Interpreter& interpreter() { return m_interpreter; }
    SinkDomain const& host() const { return m_interpreter.host(); }

    Element& create_element(std::string tag, std::optional<std::string> id = std::nullopt);
    void set_root(Element& root) { m_root = &root; }
    Element* root() const { return m_root; }

    // Only elements attached to the tree are found.
    Element* find(std::string_view id) const;
    Element* find_any(std::string_view id) const;

    // Script phase. Errors are recorded, never thrown.
    void run_script(std::string const& name, SinkDomain const& origin, bool policy, std::string_view code);
    void finish_loading();
    bool loading() const { return m_interpreter.context().page_loading; }

    // Replays one user event: phase 1, user input, phase 2, then queued responses.
    void replay(EventInput const& input);
    void drain_responses();

    // Builtin hooks.
    void add_listener(Interpreter&, Element& el, TaintedValue const& type, TaintedValue const& callback,
        Label const& ref_label);
    void require_privilege(std::string_view what) const;
    void fetch(TaintedValue const& url, TaintedValue const& callback);

    std::vector<NetworkRequest> const& requests() const { return m_net.log(); }
    std::vector<HandlerLogEntry> const& handler_log() const { return m_handler_log; }
    std::vector<ScriptLogEntry> const& script_log() const { return m_script_log; }
    std::vector<ErrorRecord> const& errors() const { return m_errors; }
    bool is_builtin(std::string_view name) const;

    std::uint64_t next_registration_seq() { return m_registration_seq++; }

private:
    struct PendingResponse {
        TaintedValue callback;
        TaintedValue body;
        double status = 200;
        Label pc_at_send;
    };

    void install_builtins();
    void dispatch(Event& ev, HandlerRegistration const* extra);
    void invoke(Event& ev, HandlerRegistration const& reg);
    void apply_user_input(Event& ev);
    Event& new_event();
    void record(Error const& e, std::string where);

    Interpreter m_interpreter;
    NetGate m_net;
    std::vector<std::unique_ptr<Element>> m_elements;
    std::vector<std::unique_ptr<Event>> m_events;
    std::unique_ptr<Document> m_document;
    Element* m_root = nullptr;
    Element* m_network_target = nullptr;
    std::unordered_map<std::string, Element*> m_ids;
    std::deque<PendingResponse> m_responses;

    std::vector<HandlerLogEntry> m_handler_log;
    std::vector<ScriptLogEntry> m_script_log;
    std::vector<ErrorRecord> m_errors;
    std::vector<std::string> m_builtins;
    std::uint64_t m_registration_seq = 0;
    std::uint64_t m_event_seq = 0;
};

}

#endif
