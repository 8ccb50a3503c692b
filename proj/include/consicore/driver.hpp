#pragma once

// Synthesized entry-point programs. A driver turns an event-driven app into a
// batch program: construct a component, replay its lifecycle, then fire the
// event (or IPC request) that leads to a vulnerable call.

#include "consicore/ir.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace consicore {

enum class ActionKind { Construct, LifecycleCall, FindWidget, TriggerEvent, ProviderInvoke };

std::string_view to_string(ActionKind k);

struct Action {
    ActionKind kind = ActionKind::Construct;
    std::string component; // Construct, LifecycleCall, ProviderInvoke
    ir::LifecycleSlot slot = ir::LifecycleSlot::OnCreate;
    std::string widget; // FindWidget, TriggerEvent

    static Action construct(std::string comp) { return {ActionKind::Construct, std::move(comp), {}, {}}; }
    static Action lifecycle(std::string comp, ir::LifecycleSlot s)
    {
        return {ActionKind::LifecycleCall, std::move(comp), s, {}};
    }
    static Action find_widget(std::string w) { return {ActionKind::FindWidget, {}, {}, std::move(w)}; }
    static Action trigger(std::string w) { return {ActionKind::TriggerEvent, {}, {}, std::move(w)}; }
    static Action provider_invoke(std::string comp) { return {ActionKind::ProviderInvoke, std::move(comp), {}, {}}; }

    bool operator==(const Action &o) const;
};

/// `Construct(Main)`, `LifecycleCall(Main, onCreate)`, `TriggerEvent(b1, click)`, ...
std::string to_string(const Action &a);

struct Driver {
    std::vector<Action> actions;
    /// Call-graph path (root first) the driver was synthesized from.
    std::vector<std::string> cg_path;

    bool operator==(const Driver &o) const { return actions == o.actions; }
};

class DriverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Checks the driver against the app: known components and widgets, Construct
/// before use, lifecycle order, clicks only on buttons of constructed
/// activities. Throws DriverError.
void validate_driver(const ir::MiniApp &app, const Driver &driver);

/// Name of the synthetic entry frame in call graphs and stack traces.
inline constexpr std::string_view kDriverMain = "DriverMain.main";

} // namespace consicore
