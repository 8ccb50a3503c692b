#include "consicore/driver.hpp"

#include <map>
#include <set>

namespace consicore {

std::string_view to_string(ActionKind k)
{
    switch (k) {
    case ActionKind::Construct: return "Construct";
    case ActionKind::LifecycleCall: return "LifecycleCall";
    case ActionKind::FindWidget: return "FindWidget";
    case ActionKind::TriggerEvent: return "TriggerEvent";
    case ActionKind::ProviderInvoke: return "ProviderInvoke";
    }
    return "?";
}

bool Action::operator==(const Action &o) const
{
    if (kind != o.kind)
        return false;
    switch (kind) {
    case ActionKind::Construct:
    case ActionKind::ProviderInvoke: return component == o.component;
    case ActionKind::LifecycleCall: return component == o.component && slot == o.slot;
    case ActionKind::FindWidget:
    case ActionKind::TriggerEvent: return widget == o.widget;
    }
    return false;
}

std::string to_string(const Action &a)
{
    std::string k(to_string(a.kind));
    switch (a.kind) {
    case ActionKind::Construct: return k + "(" + a.component + ")";
    case ActionKind::LifecycleCall: return k + "(" + a.component + ", " + std::string(ir::to_string(a.slot)) + ")";
    case ActionKind::FindWidget: return k + "(" + a.widget + ")";
    case ActionKind::TriggerEvent: return k + "(" + a.widget + ", click)";
    case ActionKind::ProviderInvoke: return k + "(" + a.component + ", <symbolic>)";
    }
    return k;
}

void validate_driver(const ir::MiniApp &app, const Driver &driver)
{
    std::set<std::string> constructed;
    std::map<std::string, int> last_slot;
    for (const auto &a : driver.actions) {
        switch (a.kind) {
        case ActionKind::Construct:
            if (!app.component(a.component))
                throw DriverError("driver constructs unknown component '" + a.component + "'");
            constructed.insert(a.component);
            last_slot[a.component] = -1;
            break;
        case ActionKind::LifecycleCall: {
            const auto *c = app.component(a.component);
            if (!c || c->kind != ir::ComponentKind::Activity)
                throw DriverError("lifecycle call on unknown activity '" + a.component + "'");
            if (!constructed.count(a.component))
                throw DriverError("lifecycle call before Construct(" + a.component + ")");
            int s = static_cast<int>(a.slot);
            if (s <= last_slot[a.component])
                throw DriverError("lifecycle calls on '" + a.component + "' out of order");
            last_slot[a.component] = s;
            break;
        }
        case ActionKind::FindWidget:
        case ActionKind::TriggerEvent: {
            const ir::Component *owner = nullptr;
            const auto *w = app.find_widget(a.widget, &owner);
            if (!w)
                throw DriverError("driver references unknown widget '" + a.widget + "'");
            if (!constructed.count(owner->name))
                throw DriverError("widget '" + a.widget + "' used before Construct(" + owner->name + ")");
            if (a.kind == ActionKind::TriggerEvent && w->kind != ir::WidgetKind::Button)
                throw DriverError("TriggerEvent target '" + a.widget + "' is not a button");
            break;
        }
        case ActionKind::ProviderInvoke: {
            const auto *c = app.component(a.component);
            if (!c || c->kind != ir::ComponentKind::Provider)
                throw DriverError("driver invokes unknown provider '" + a.component + "'");
            if (!constructed.count(a.component))
                throw DriverError("ProviderInvoke before Construct(" + a.component + ")");
            break;
        }
        }
    }
}

} // namespace consicore
