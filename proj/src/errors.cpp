#include "l0dag/errors.hpp"

#include <iostream>
#include <mutex>

namespace l0dag {

namespace {

std::mutex& handler_mutex() {
    static std::mutex m;
    return m;
}

WarningHandler& handler_slot() {
    static WarningHandler h = [](std::string_view msg) { std::cerr << "l0dag: warning: " << msg << '\n'; };
    return h;
}

}  // namespace

WarningHandler set_warning_handler(WarningHandler handler) {
    std::lock_guard lock(handler_mutex());
    auto old = std::move(handler_slot());
    handler_slot() = std::move(handler);
    return old;
}

void warn(std::string_view message) {
    std::lock_guard lock(handler_mutex());
    if (handler_slot()) handler_slot()(message);
}

}  // namespace l0dag
