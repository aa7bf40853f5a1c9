// Copyright 2026 The webpol-sim Authors
//
// Licensed under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "webpol/browser.hpp"

#include "webpol/parser.hpp"

#include <algorithm>

namespace webpol {

namespace {

bool is_content_property(std::string_view name)
{
    return name == "value" || name == "innerText" || name == "innerHTML" || name == "textContent";
}

TaintedValue const& arg(std::span<TaintedValue const> args, std::size_t i)
{
    static TaintedValue const null_value { Null {}, {} };
    return i < args.size() ? args[i] : null_value;
}

Element& element_arg(std::span<TaintedValue const> args, std::size_t i, std::string_view method)
{
    if (auto* const* host = std::get_if<HostObject*>(&arg(args, i).payload)) {
        if (auto* el = dynamic_cast<Element*>(*host))
            return *el;
    }
    Interpreter::throw_type_error(std::string(method) + " expects an element");
}

TaintedValue method_ref(HostObject* host, std::string_view name)
{
    return make_value(BoundMethod { host, {}, std::string(name) });
}

std::string handler_name(TaintedValue const& callback)
{
    if (auto* const* closure = std::get_if<Closure*>(&callback.payload)) {
        if (!(*closure)->fn->name.empty())
            return (*closure)->fn->name;
    }
    return "<anonymous>";
}

}

// Element

TaintedValue Element::read_value(Interpreter& interp) const
{
    return make_value(value.payload, interp.lub(value.label, element_label));
}

TaintedValue Element::read_attribute(Interpreter& interp, std::string_view name) const
{
    auto floor = interp.lub(element_label, {});
    if (auto it = attributes.find(name); it != attributes.end())
        return make_value(it->second.payload, interp.lub(it->second.label, floor));
    return make_value(Null {}, floor);
}

TaintedValue Element::get_member(Interpreter& interp, std::string_view name, Label const&)
{
    auto floor = interp.lub(element_label, {});
    if (is_content_property(name))
        return read_value(interp);
    if (name == "id")
        return id ? make_value(*id, floor) : make_value(Null {}, floor);
    if (name == "tagName")
        return make_value(tag, floor);
    if (name == "parentNode")
        return parent && !parent->hidden ? make_value(static_cast<HostObject*>(parent), floor) : make_value(Null {}, floor);
    if (name == "addEventListener" || name == "setLabel" || name == "getAttribute" || name == "setAttribute"
        || name == "appendChild" || name == "removeChild" || name == "setInnerText" || name == "setValue")
        return method_ref(this, name);
    return make_value(Null {}, floor);
}

void Element::set_member(Interpreter& interp, std::string_view name, TaintedValue v, Label const& ref_label)
{
    if (is_content_property(name))
        write_value(interp, std::move(v), ref_label);
    else
        write_attribute(interp, name, std::move(v), ref_label);
}

TaintedValue Element::call_method(Interpreter& interp, std::string_view name, std::span<TaintedValue const> args,
    Label const& ref_label)
{
    if (name == "addEventListener") {
        m_page.add_listener(interp, *this, arg(args, 0), arg(args, 1), ref_label);
    } else if (name == "setLabel") {
        m_page.require_privilege("setLabel");
        element_label = parse_label(to_display_string(arg(args, 0).payload), m_page.host());
    } else if (name == "getAttribute") {
        auto const& key = arg(args, 0);
        auto result = read_attribute(interp, to_display_string(key.payload));
        result.label = interp.lub(result.label, key.label);
        return result;
    } else if (name == "setAttribute") {
        auto const& key = arg(args, 0);
        write_attribute(interp, to_display_string(key.payload), arg(args, 1), interp.lub(ref_label, key.label));
    } else if (name == "appendChild") {
        append_child(interp, element_arg(args, 0, name));
    } else if (name == "removeChild") {
        remove_child(interp, element_arg(args, 0, name));
    } else if (name == "setInnerText" || name == "setValue") {
        write_value(interp, arg(args, 0), ref_label);
    } else {
        Interpreter::throw_type_error("Element has no method '" + std::string(name) + "'");
    }
    return make_value(Null {});
}

void Element::write_value(Interpreter& interp, TaintedValue v, Label const& ref_label)
{
    // Content writes are data flows: allowed on protected elements, governed by labels.
    v.payload = v.is_null() ? std::string {} : to_display_string(v.payload);
    // Every read joins the element floor, so the slot is effectively labeled at least that.
    value.label = interp.lub(value.label, element_label);
    interp.write_slot(value, std::move(v), ref_label, describe() + ".value");
}

void Element::write_attribute(Interpreter& interp, std::string_view name, TaintedValue v, Label const& ref_label)
{
    if (is_protected && !interp.context().privileged)
        throw Error(ErrorKind::ProtectedElementError, "cannot change attribute '" + std::string(name) + "' of protected element " + describe());
    v.payload = to_display_string(v.payload);
    auto target = describe() + "." + std::string(name);
    if (auto it = attributes.find(name); it != attributes.end()) {
        it->second.label = interp.lub(it->second.label, element_label);
        interp.write_slot(it->second, std::move(v), ref_label, target);
        return;
    }
    // An absent attribute reads as null at the element floor.
    TaintedValue slot { Null {}, interp.lub(element_label, {}) };
    interp.write_slot(slot, std::move(v), ref_label, target);
    attributes.emplace(std::string(name), std::move(slot));
}

void Element::append_child(Interpreter& interp, Element& child)
{
    if (&child == this || child.is_ancestor_of(*this))
        Interpreter::throw_type_error("appendChild would create a cycle");
    if (child.parent) {
        if (child.subtree_protected() && !interp.context().privileged)
            throw Error(ErrorKind::ProtectedElementError, "cannot move protected element " + child.describe());
        auto& siblings = child.parent->children;
        siblings.erase(std::find(siblings.begin(), siblings.end(), &child));
    }
    child.parent = this;
    children.push_back(&child);
}

void Element::remove_child(Interpreter& interp, Element& child)
{
    if (child.parent != this)
        Interpreter::throw_type_error(child.describe() + " is not a child of " + describe());
    if (child.subtree_protected() && !interp.context().privileged)
        throw Error(ErrorKind::ProtectedElementError, "cannot detach protected element " + child.describe());
    children.erase(std::find(children.begin(), children.end(), &child));
    child.parent = nullptr;
}

bool Element::subtree_protected() const
{
    if (is_protected)
        return true;
    return std::any_of(children.begin(), children.end(), [](Element const* c) { return c->subtree_protected(); });
}

bool Element::is_ancestor_of(Element const& other) const
{
    for (auto const* e = other.parent; e; e = e->parent) {
        if (e == this)
            return true;
    }
    return false;
}

bool Element::attached() const
{
    auto const* e = this;
    while (e->parent)
        e = e->parent;
    return e == m_page.root();
}

std::string Element::describe() const
{
    return id ? "#" + *id : "<" + tag + ">";
}

// Event

TaintedValue Event::get_member(Interpreter& interp, std::string_view name, Label const&)
{
    auto floor = interp.lub(event_label, {});
    if (name == "type")
        return make_value(type, floor);
    if (name == "target") {
        if (target && !target->hidden)
            return make_value(static_cast<HostObject*>(target), floor);
        return make_value(Null {}, floor);
    }
    if (name == "setLabel" || name == "setContext")
        return method_ref(this, name);
    if (auto it = data.find(name); it != data.end())
        return make_value(it->second.payload, interp.lub(it->second.label, floor));
    return make_value(Null {}, floor);
}

void Event::set_member(Interpreter&, std::string_view name, TaintedValue, Label const&)
{
    Interpreter::throw_type_error("event property '" + std::string(name) + "' is read-only");
}

TaintedValue Event::call_method(Interpreter&, std::string_view name, std::span<TaintedValue const> args, Label const&)
{
    if (name == "setLabel") {
        m_page.require_privilege("setLabel");
        event_label = parse_label(to_display_string(arg(args, 0).payload), m_page.host());
    } else if (name == "setContext") {
        m_page.require_privilege("setContext");
        context_label = join(context_label, parse_label(to_display_string(arg(args, 0).payload), m_page.host()));
    } else {
        Interpreter::throw_type_error("Event has no method '" + std::string(name) + "'");
    }
    return make_value(Null {});
}

// Document

TaintedValue Document::get_member(Interpreter&, std::string_view name, Label const&)
{
    if (name == "body" && m_page.root())
        return make_value(static_cast<HostObject*>(m_page.root()));
    if (name == "getElementById" || name == "createElement")
        return method_ref(this, name);
    return make_value(Null {});
}

void Document::set_member(Interpreter&, std::string_view name, TaintedValue, Label const&)
{
    Interpreter::throw_type_error("document property '" + std::string(name) + "' is read-only");
}

TaintedValue Document::call_method(Interpreter&, std::string_view name, std::span<TaintedValue const> args,
    Label const&)
{
    auto const& a = arg(args, 0);
    if (name == "getElementById") {
        // Which element comes back depends on the id string.
        if (auto* el = m_page.find(to_display_string(a.payload)))
            return make_value(static_cast<HostObject*>(el), a.label);
        return make_value(Null {}, a.label);
    }
    if (name == "createElement")
        return make_value(static_cast<HostObject*>(&m_page.create_element(to_display_string(a.payload))), a.label);
    Interpreter::throw_type_error("document has no method '" + std::string(name) + "'");
}

// Page

Page::Page(SinkDomain host, PageOptions options, std::vector<CannedResponse> responses)
    : m_interpreter(std::move(host),
        InterpreterOptions { .mode = options.mode, .track_labels = options.track_labels, .step_budget = options.step_budget })
    , m_net(std::move(responses), options.force_block_all)
    , m_document(std::make_unique<Document>(*this))
{
    m_network_target = &create_element("network");
    m_network_target->hidden = true;
    install_builtins();
}

Page::~Page() = default;

Element& Page::create_element(std::string tag, std::optional<std::string> id)
{
    auto& el = *m_elements.emplace_back(std::make_unique<Element>(*this, std::move(tag), id));
    if (id)
        m_ids.emplace(*id, &el);
    return el;
}

Element* Page::find_any(std::string_view id) const
{
    auto it = m_ids.find(std::string(id));
    return it == m_ids.end() ? nullptr : it->second;
}

Element* Page::find(std::string_view id) const
{
    auto* el = find_any(id);
    return el && el->attached() ? el : nullptr;
}

bool Page::is_builtin(std::string_view name) const
{
    return std::find(m_builtins.begin(), m_builtins.end(), name) != m_builtins.end();
}

void Page::install_builtins()
{
    auto& interp = m_interpreter;
    interp.globals().declare("document", make_value(static_cast<HostObject*>(m_document.get())));
    m_builtins.push_back("document");

    auto define = [&](std::string name, NativeFn fn) {
        m_builtins.push_back(name);
        interp.define_native(std::move(name), std::move(fn));
    };
    define("sendRequest", [this](Interpreter& in, std::span<TaintedValue const> args) {
        m_net.send(in, arg(args, 0));
        return make_value(Null {});
    });
    define("fetch", [this](Interpreter&, std::span<TaintedValue const> args) {
        fetch(arg(args, 0), arg(args, 1));
        return make_value(Null {});
    });
    define("Number", [](Interpreter&, std::span<TaintedValue const> args) {
        auto const& a = arg(args, 0);
        return make_value(to_number(a.payload), a.label);
    });
    define("String", [](Interpreter&, std::span<TaintedValue const> args) {
        auto const& a = arg(args, 0);
        return make_value(to_display_string(a.payload), a.label);
    });
}

void Page::require_privilege(std::string_view what) const
{
    if (!m_interpreter.context().privileged)
        throw Error(ErrorKind::PrivilegeError, std::string(what) + " may only be called by policy code");
}

void Page::add_listener(Interpreter& interp, Element& el, TaintedValue const& type, TaintedValue const& callback,
    Label const& ref_label)
{
    if (!std::holds_alternative<Closure*>(callback.payload))
        Interpreter::throw_type_error("addEventListener expects a function");
    bool privileged = interp.context().privileged;
    if (privileged && !loading())
        throw Error(ErrorKind::PolicyInstallError, "policy handlers can only be installed while the page loads");
    HandlerRegistration reg;
    reg.event_type = to_display_string(type.payload);
    reg.callback = callback;
    reg.privileged = privileged;
    reg.seq = next_registration_seq();
    reg.label = interp.lub(interp.lub(interp.pc(), ref_label), interp.lub(type.label, callback.label));
    el.handlers.push_back(std::move(reg));
    if (privileged)
        el.is_protected = true;
}

void Page::fetch(TaintedValue const& url, TaintedValue const& callback)
{
    if (!std::holds_alternative<Closure*>(callback.payload))
        Interpreter::throw_type_error("fetch expects a callback function");
    auto const& request = m_net.send(m_interpreter, url);
    if (!request.allowed)
        return;
    PendingResponse pending;
    pending.callback = callback;
    pending.pc_at_send = request.pc_at_send;
    if (auto const* canned = m_net.match(request.url)) {
        pending.body = make_value(canned->body, m_interpreter.lub(parse_label(canned->body_label_text, host()), {}));
    } else {
        pending.body = make_value(std::string {});
        pending.status = 404;
    }
    m_responses.push_back(std::move(pending));
}

void Page::record(Error const& e, std::string where)
{
    m_errors.push_back({ e.kind(), std::move(where), e.span(), e.what() });
}

void Page::run_script(std::string const& name, SinkDomain const& origin, bool policy, std::string_view code)
{
    ScriptLogEntry entry { name, origin.name(), policy, "ok" };
    try {
        auto program = parse_source(code);
        m_interpreter.reset_budget();
        PcScope scope(m_interpreter.context().pc);
        m_interpreter.run_program(*program, policy, origin);
    } catch (Error const& e) {
        record(e, name);
        entry.outcome = std::string(to_string(e.kind()));
    }
    m_script_log.push_back(std::move(entry));
}

void Page::finish_loading()
{
    m_interpreter.context().page_loading = false;
    m_interpreter.context().privileged = false;
}

Event& Page::new_event()
{
    auto& ev = *m_events.emplace_back(std::make_unique<Event>(*this));
    ev.seq = m_event_seq++;
    return ev;
}

void Page::replay(EventInput const& input)
{
    auto* target = find_any(input.target_id);
    if (!target) {
        record(Error(ErrorKind::TypeError, "event target '" + input.target_id + "' does not exist"), "event " + input.type);
        return;
    }
    auto& ev = new_event();
    ev.type = input.type;
    ev.target = target;
    for (auto const& [key, value] : input.data)
        ev.data.emplace(key, make_value(value));
    dispatch(ev, nullptr);
    drain_responses();
}

void Page::drain_responses()
{
    constexpr int max_responses = 10'000;
    int delivered = 0;
    while (!m_responses.empty()) {
        if (++delivered > max_responses) {
            record(Error(ErrorKind::ResourceLimit, "too many queued responses"), "network");
            m_responses.clear();
            return;
        }
        auto pending = std::move(m_responses.front());
        m_responses.pop_front();

        auto& ev = new_event();
        ev.type = "response";
        ev.target = m_network_target;
        ev.context_label = m_interpreter.lub(pending.pc_at_send, {});
        ev.data.emplace("responseText", std::move(pending.body));
        ev.data.emplace("readyState", make_value(4.0));
        ev.data.emplace("status", make_value(pending.status));

        HandlerRegistration reg;
        reg.event_type = "response";
        reg.callback = pending.callback;
        reg.privileged = std::get<Closure*>(pending.callback.payload)->privileged;
        reg.seq = next_registration_seq();
        reg.label = m_interpreter.lub(pending.callback.label, {});
        dispatch(ev, &reg);
    }
}

void Page::dispatch(Event& ev, HandlerRegistration const* extra)
{
    // Snapshot: handlers registered during this dispatch run from the next event on.
    std::vector<HandlerRegistration> phase1;
    std::vector<HandlerRegistration> phase2;
    for (auto* el = ev.target; el; el = el->parent) {
        for (auto const& reg : el->handlers) {
            if (reg.event_type == ev.type)
                (reg.privileged ? phase1 : phase2).push_back(reg);
        }
    }
    if (extra)
        (extra->privileged ? phase1 : phase2).push_back(*extra);

    for (auto const& reg : phase1)
        invoke(ev, reg);
    if (ev.type == "keypress")
        apply_user_input(ev);
    for (auto const& reg : phase2)
        invoke(ev, reg);
}

void Page::invoke(Event& ev, HandlerRegistration const& reg)
{
    auto& ctx = m_interpreter.context();
    PcScope scope(ctx.pc);
    if (m_interpreter.tracking()) {
        ctx.pc.push(ev.context_label, FrameOrigin::DispatchContext);
        ctx.pc.push(reg.label, FrameOrigin::HandlerEntry);
    }
    ctx.privileged = false;

    HandlerLogEntry entry;
    entry.event_seq = ev.seq;
    entry.event_type = ev.type;
    entry.target = ev.target == m_network_target ? "#network" : ev.target->describe();
    entry.handler = handler_name(reg.callback);
    entry.registration_seq = reg.seq;
    entry.privileged = reg.privileged;
    entry.pc_at_entry = m_interpreter.pc();
    entry.event_label = m_interpreter.lub(ev.event_label, {});
    entry.context_label = m_interpreter.lub(ev.context_label, {});
    entry.outcome = "ok";

    m_interpreter.reset_budget();
    if (auto* observer = m_interpreter.observer())
        observer->on_handler_entry(ev.seq, reg.privileged);
    try {
        auto ref = make_value(static_cast<HostObject*>(&ev), m_interpreter.lub(ev.event_label, {}));
        m_interpreter.call(reg.callback, std::span(&ref, 1));
    } catch (Error const& e) {
        record(e, "handler " + std::to_string(reg.seq) + " (" + ev.type + " on " + entry.target + ")");
        entry.outcome = std::string(to_string(e.kind()));
    }
    ctx.privileged = false;
    m_handler_log.push_back(std::move(entry));
}

void Page::apply_user_input(Event& ev)
{
    auto it = ev.data.find("key");
    if (!ev.target || it == ev.data.end())
        return;
    auto& el = *ev.target;
    auto const& key = it->second;
    auto& in = m_interpreter;
    auto label = in.lub(in.lub(el.value.label, key.label), in.lub(ev.event_label, el.element_label));
    label = in.lub(label, ev.context_label);
    auto text = (el.value.is_null() ? std::string {} : to_display_string(el.value.payload)) + to_display_string(key.payload);
    el.value = make_value(std::move(text), std::move(label));
}

}
