use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::{NodePlan, PackageName};
use crate::cgen::{emit_c99, COptions, EmittedPackage};
use crate::mtlcore::Value;
use crate::reqlang::VarKind;
use crate::streamc::MonitorSpec;

const QUEUE_DEPTH: u32 = 10;

/// Emits the package tree under `<name>/`: both node sources, the monitor
/// C files, `package.xml` and `CMakeLists.txt`.
pub fn gen_package(
    plan: &NodePlan,
    m: &MonitorSpec,
    name: &PackageName,
    c: COptions,
) -> EmittedPackage {
    let root = name.as_str();
    let mut pkg = EmittedPackage::default();
    for (file, text) in emit_c99(m, c).files {
        pkg.files.insert(format!("{root}/copilot/{file}"), text);
    }
    pkg.files
        .insert(format!("{root}/src/monitor_node.cpp"), monitor_node(plan, name));
    pkg.files
        .insert(format!("{root}/src/logger_node.cpp"), logger_node(plan, name));
    pkg.files.insert(format!("{root}/package.xml"), package_xml(name));
    pkg.files.insert(format!("{root}/CMakeLists.txt"), cmake_lists(name));
    pkg
}

fn cpp_default(v: Value) -> String {
    match v {
        Value::Bool(b) => b.to_string(),
        Value::Num(n) => format!("{n:?}"),
    }
}

fn monitor_node(plan: &NodePlan, name: &PackageName) -> String {
    let mut s = String::new();
    s.push_str(
        "// Generated monitoring node.\n\
         //\n\
         // Each input callback stores the new value and re-evaluates all\n\
         // monitors. Callbacks must run on a single-threaded executor: the\n\
         // monitor state is not reentrant.\n\n",
    );
    let headers: BTreeSet<String> = plan
        .subscriptions
        .iter()
        .map(|sub| sub.msg_type.cpp_header())
        .collect();
    s.push_str("#include <functional>\n#include <memory>\n\n");
    s.push_str("#include \"rclcpp/rclcpp.hpp\"\n");
    s.push_str("#include \"std_msgs/msg/empty.hpp\"\n");
    for h in &headers {
        let _ = writeln!(s, "#include \"{h}\"");
    }
    s.push_str("\n#include \"monitor.h\"\n\nusing std::placeholders::_1;\n\n");

    s.push_str("class MonitorNode : public rclcpp::Node {\n public:\n");
    let _ = writeln!(s, "  MonitorNode() : Node(\"{}_monitor\") {{", name.as_str());
    for p in &plan.parameters {
        let ty = match p.default.kind() {
            VarKind::Boolean => "bool",
            VarKind::Numeric => "double",
        };
        let _ = writeln!(
            s,
            "    ::{v} = this->declare_parameter<{ty}>(\"{v}\", {d});",
            v = p.variable,
            d = cpp_default(p.default)
        );
    }
    for sub in &plan.subscriptions {
        let _ = writeln!(
            s,
            "    {f} = this->create_subscription<{t}>(\n        \"{topic}\", {QUEUE_DEPTH},\n        \
             std::bind(&MonitorNode::{v}_callback, this, _1));",
            f = sub.field_name,
            t = sub.msg_type.cpp_type(),
            topic = sub.topic,
            v = sub.variable,
        );
    }
    for p in &plan.publishers {
        let _ = writeln!(
            s,
            "    {f} = this->create_publisher<std_msgs::msg::Empty>(\n        \"{topic}\", {QUEUE_DEPTH});",
            f = p.field_name,
            topic = p.topic,
        );
    }
    s.push_str("  }\n");
    for p in &plan.publishers {
        let _ = write!(
            s,
            "\n  void publish_{h}() {{\n    auto msg = std_msgs::msg::Empty();\n    {f}->publish(msg);\n  }}\n",
            h = p.handler,
            f = p.field_name,
        );
    }
    s.push_str("\n private:\n");
    for sub in &plan.subscriptions {
        let _ = write!(
            s,
            "  void {v}_callback(const {t}::SharedPtr mon_msg) {{\n    ::{v} = mon_msg->data;\n    \
             {v}_received_ = true;\n    evaluate();\n  }}\n\n",
            v = sub.variable,
            t = sub.msg_type.cpp_type(),
        );
    }
    if !plan.subscriptions.is_empty() {
        let ready: Vec<String> = plan
            .subscriptions
            .iter()
            .map(|sub| format!("{}_received_", sub.variable))
            .collect();
        s.push_str("  // Steps only once every subscribed input has been received.\n");
        let _ = writeln!(
            s,
            "  void evaluate() {{\n    if ({}) {{\n      step();\n    }}\n  }}\n",
            ready.join(" && ")
        );
    }
    for sub in &plan.subscriptions {
        let _ = writeln!(
            s,
            "  rclcpp::Subscription<{t}>::SharedPtr {f};\n  bool {v}_received_ = false;",
            t = sub.msg_type.cpp_type(),
            f = sub.field_name,
            v = sub.variable,
        );
    }
    for p in &plan.publishers {
        let _ = writeln!(
            s,
            "  rclcpp::Publisher<std_msgs::msg::Empty>::SharedPtr {};",
            p.field_name
        );
    }
    s.push_str("};\n\n");

    s.push_str("static MonitorNode *active_node = nullptr;\n\n");
    if !plan.publishers.is_empty() {
        s.push_str("// Violation handlers called from step().\n");
    }
    for p in &plan.publishers {
        let _ = writeln!(
            s,
            "void {h}(void) {{\n  active_node->publish_{h}();\n}}\n",
            h = p.handler
        );
    }
    s.push_str(
        "int main(int argc, char *argv[]) {\n  rclcpp::init(argc, argv);\n  \
         auto node = std::make_shared<MonitorNode>();\n  active_node = node.get();\n  \
         rclcpp::spin(node);\n  active_node = nullptr;\n  rclcpp::shutdown();\n  return 0;\n}\n",
    );
    s
}

fn logger_node(plan: &NodePlan, name: &PackageName) -> String {
    let mut s = String::new();
    s.push_str(
        "// Generated logging node: reports every violation message to the\n\
         // default logger. Optional; disable with -DBUILD_LOGGER=OFF.\n\n",
    );
    s.push_str("#include <functional>\n#include <memory>\n\n");
    s.push_str("#include \"rclcpp/rclcpp.hpp\"\n#include \"std_msgs/msg/empty.hpp\"\n\n");
    s.push_str("using std::placeholders::_1;\n\n");
    s.push_str("class LoggerNode : public rclcpp::Node {\n public:\n");
    let _ = writeln!(s, "  LoggerNode() : Node(\"{}_logger\") {{", name.as_str());
    for l in &plan.logger_subscriptions {
        let _ = writeln!(
            s,
            "    {f} = this->create_subscription<std_msgs::msg::Empty>(\n        \"{topic}\", {QUEUE_DEPTH},\n        \
             std::bind(&LoggerNode::{h}_callback, this, _1));",
            f = l.field_name,
            topic = l.topic,
            h = l.handler,
        );
    }
    s.push_str("  }\n\n private:\n");
    for l in &plan.logger_subscriptions {
        let _ = write!(
            s,
            "  void {h}_callback(const std_msgs::msg::Empty::SharedPtr mon_msg) const {{\n    \
             (void)mon_msg;\n    RCLCPP_INFO(this->get_logger(), \"violation: {h}\");\n  }}\n\n",
            h = l.handler,
        );
    }
    for l in &plan.logger_subscriptions {
        let _ = writeln!(
            s,
            "  rclcpp::Subscription<std_msgs::msg::Empty>::SharedPtr {};",
            l.field_name
        );
    }
    s.push_str("};\n\n");
    s.push_str(
        "int main(int argc, char *argv[]) {\n  rclcpp::init(argc, argv);\n  \
         rclcpp::spin(std::make_shared<LoggerNode>());\n  rclcpp::shutdown();\n  return 0;\n}\n",
    );
    s
}

fn package_xml(name: &PackageName) -> String {
    format!(
        r#"<?xml version="1.0"?>
<?xml-model href="http://download.ros.org/schema/package_format3.xsd" schematypens="http://www.w3.org/2001/XMLSchema"?>
<package format="3">
  <name>{name}</name>
  <version>0.1.0</version>
  <description>Generated runtime monitors. Executables: monitor_node, logger_node (optional, disable with BUILD_LOGGER=OFF).</description>
  <maintainer email="maintainer@example.com">maintainer</maintainer>
  <license>Apache-2.0</license>

  <buildtool_depend>ament_cmake</buildtool_depend>

  <depend>rclcpp</depend>
  <depend>std_msgs</depend>

  <export>
    <build_type>ament_cmake</build_type>
  </export>
</package>
"#,
        name = name.as_str()
    )
}

fn cmake_lists(name: &PackageName) -> String {
    format!(
        r#"cmake_minimum_required(VERSION 3.8)
project({name} C CXX)

option(BUILD_LOGGER "Build the violation logging node" ON)

find_package(ament_cmake REQUIRED)
find_package(rclcpp REQUIRED)
find_package(std_msgs REQUIRED)

add_library(copilot_monitor STATIC copilot/monitor.c)
target_include_directories(copilot_monitor PUBLIC copilot)
set_target_properties(copilot_monitor PROPERTIES C_STANDARD 99)

add_executable(monitor_node src/monitor_node.cpp)
target_link_libraries(monitor_node copilot_monitor)
ament_target_dependencies(monitor_node rclcpp std_msgs)
install(TARGETS monitor_node DESTINATION lib/${{PROJECT_NAME}})

if(BUILD_LOGGER)
  add_executable(logger_node src/logger_node.cpp)
  ament_target_dependencies(logger_node rclcpp std_msgs)
  install(TARGETS logger_node DESTINATION lib/${{PROJECT_NAME}})
endif()

ament_package()
"#,
        name = name.as_str()
    )
}
