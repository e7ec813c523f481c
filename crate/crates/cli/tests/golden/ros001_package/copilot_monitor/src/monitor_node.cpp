// Generated monitoring node.
//
// Each input callback stores the new value and re-evaluates all
// monitors. Callbacks must run on a single-threaded executor: the
// monitor state is not reentrant.

#include <functional>
#include <memory>

#include "rclcpp/rclcpp.hpp"
#include "std_msgs/msg/empty.hpp"
#include "std_msgs/msg/float32.hpp"

#include "monitor.h"

using std::placeholders::_1;

class MonitorNode : public rclcpp::Node {
 public:
  MonitorNode() : Node("copilot_monitor_monitor") {
    ::cc_t = this->declare_parameter<double>("cc_t", 10.0);
    ::ws_t = this->declare_parameter<double>("ws_t", 5.0);
    current_consumption_subscription_ = this->create_subscription<std_msgs::msg::Float32>(
        "motor/current", 10,
        std::bind(&MonitorNode::current_consumption_callback, this, _1));
    windspeed_subscription_ = this->create_subscription<std_msgs::msg::Float32>(
        "windspeed", 10,
        std::bind(&MonitorNode::windspeed_callback, this, _1));
    handlerpropROS_001_publisher_ = this->create_publisher<std_msgs::msg::Empty>(
        "copilot/handlerpropROS_001", 10);
  }

  void publish_handlerpropROS_001() {
    auto msg = std_msgs::msg::Empty();
    handlerpropROS_001_publisher_->publish(msg);
  }

 private:
  void current_consumption_callback(const std_msgs::msg::Float32::SharedPtr mon_msg) {
    ::current_consumption = mon_msg->data;
    current_consumption_received_ = true;
    evaluate();
  }

  void windspeed_callback(const std_msgs::msg::Float32::SharedPtr mon_msg) {
    ::windspeed = mon_msg->data;
    windspeed_received_ = true;
    evaluate();
  }

  // Steps only once every subscribed input has been received.
  void evaluate() {
    if (current_consumption_received_ && windspeed_received_) {
      step();
    }
  }

  rclcpp::Subscription<std_msgs::msg::Float32>::SharedPtr current_consumption_subscription_;
  bool current_consumption_received_ = false;
  rclcpp::Subscription<std_msgs::msg::Float32>::SharedPtr windspeed_subscription_;
  bool windspeed_received_ = false;
  rclcpp::Publisher<std_msgs::msg::Empty>::SharedPtr handlerpropROS_001_publisher_;
};

static MonitorNode *active_node = nullptr;

// Violation handlers called from step().
void handlerpropROS_001(void) {
  active_node->publish_handlerpropROS_001();
}

int main(int argc, char *argv[]) {
  rclcpp::init(argc, argv);
  auto node = std::make_shared<MonitorNode>();
  active_node = node.get();
  rclcpp::spin(node);
  active_node = nullptr;
  rclcpp::shutdown();
  return 0;
}
