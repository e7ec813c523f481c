//! ROS2 package generation around a compiled monitor.
//!
//! Inputs are mapped to topics (or node parameters) by a variable-mapping
//! file. Each extern becomes a subscription, each requirement a publisher of
//! empty messages on `<prefix>/<handler>`, and a logging node mirrors the
//! publishers.

mod templates;

use serde::Deserialize;
use thiserror::Error;

use crate::mtlcore::Value;
use crate::reqlang::{is_valid_identifier, VarKind};
use crate::streamc::MonitorSpec;

pub use templates::gen_package;

/// Default namespace of violation topics.
pub const DEFAULT_PREFIX: &str = "copilot";

/// Supported `std_msgs` payload types: (name, header stem, kind).
const MESSAGE_TYPES: &[(&str, &str, VarKind)] = &[
    ("Bool", "bool", VarKind::Boolean),
    ("Float32", "float32", VarKind::Numeric),
    ("Float64", "float64", VarKind::Numeric),
    ("Int8", "int8", VarKind::Numeric),
    ("Int16", "int16", VarKind::Numeric),
    ("Int32", "int32", VarKind::Numeric),
    ("Int64", "int64", VarKind::Numeric),
    ("UInt8", "u_int8", VarKind::Numeric),
    ("UInt16", "u_int16", VarKind::Numeric),
    ("UInt32", "u_int32", VarKind::Numeric),
    ("UInt64", "u_int64", VarKind::Numeric),
];

/// A `std_msgs/msg/<Name>` message type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MessageType(usize);

impl MessageType {
    /// Accepts `std_msgs/msg/Float64` or the short form `std_msgs/Float64`.
    pub fn parse(s: &str) -> Option<Self> {
        let name = s
            .strip_prefix("std_msgs/msg/")
            .or_else(|| s.strip_prefix("std_msgs/"))?;
        MESSAGE_TYPES
            .iter()
            .position(|(n, _, _)| *n == name)
            .map(MessageType)
    }

    pub fn name(self) -> &'static str {
        MESSAGE_TYPES[self.0].0
    }

    pub fn kind(self) -> VarKind {
        MESSAGE_TYPES[self.0].2
    }

    /// `std_msgs/msg/Float64`
    pub fn ros_name(self) -> String {
        format!("std_msgs/msg/{}", self.name())
    }

    /// `std_msgs::msg::Float64`
    pub fn cpp_type(self) -> String {
        format!("std_msgs::msg::{}", self.name())
    }

    /// `std_msgs/msg/float64.hpp`
    pub fn cpp_header(self) -> String {
        format!("std_msgs/msg/{}.hpp", MESSAGE_TYPES[self.0].1)
    }
}

/// Where a monitor input gets its value from.
#[derive(Debug, Clone, PartialEq)]
pub enum VarSource {
    Topic(String),
    /// Node parameter with a default value, set once at startup.
    Parameter(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarEntry {
    pub name: String,
    pub msg_type: MessageType,
    pub source: VarSource,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VarMapping {
    pub entries: Vec<VarEntry>,
}

impl VarMapping {
    pub fn get(&self, name: &str) -> Option<&VarEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NodegenError {
    #[error("invalid variable mapping: {0}")]
    Parse(String),
    #[error("variable `{0}` is mapped more than once")]
    DuplicateVariable(String),
    #[error("invalid topic name `{0}`")]
    InvalidTopic(String),
    #[error("unsupported message type `{msg_type}` for `{name}`")]
    UnsupportedMessageType { name: String, msg_type: String },
    #[error("parameter `{name}` default does not match message type `{msg_type}`")]
    ParameterKindMismatch { name: String, msg_type: String },
    #[error("`{0}` needs exactly one of `topic` or `parameter`")]
    AmbiguousSource(String),
    #[error("input `{0}` has no entry in the variable mapping")]
    UnmappedVariable(String),
    #[error("input `{name}` is {kind} but is mapped to `{msg_type}`")]
    MessageKindMismatch {
        name: String,
        kind: VarKind,
        msg_type: String,
    },
    #[error("invalid package name `{0}`")]
    InvalidPackageName(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMapping {
    variables: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    name: String,
    #[serde(rename = "type")]
    msg_type: String,
    topic: Option<String>,
    parameter: Option<Value>,
}

/// A ROS topic name: optional leading `/`, then non-empty `/`-separated
/// segments of ASCII alphanumerics and `_`, each not starting with a digit.
pub fn is_valid_topic(topic: &str) -> bool {
    let body = topic.strip_prefix('/').unwrap_or(topic);
    !body.is_empty()
        && body.split('/').all(|seg| {
            !seg.is_empty()
                && !seg.starts_with(|c: char| c.is_ascii_digit())
                && seg.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        })
}

/// Parses a variable-mapping file:
/// `{"variables": [{"name", "type", "topic" | "parameter"}]}`.
/// Blank input is an empty mapping.
pub fn load_varmap(src: &str) -> Result<VarMapping, NodegenError> {
    if src.trim().is_empty() {
        return Ok(VarMapping::default());
    }
    let raw: RawMapping =
        serde_json::from_str(src).map_err(|e| NodegenError::Parse(e.to_string()))?;
    let mut entries: Vec<VarEntry> = Vec::with_capacity(raw.variables.len());
    for r in raw.variables {
        if !is_valid_identifier(&r.name) {
            return Err(NodegenError::Parse(format!(
                "`{}` is not a valid variable name",
                r.name
            )));
        }
        if entries.iter().any(|e| e.name == r.name) {
            return Err(NodegenError::DuplicateVariable(r.name));
        }
        let msg_type =
            MessageType::parse(&r.msg_type).ok_or_else(|| NodegenError::UnsupportedMessageType {
                name: r.name.clone(),
                msg_type: r.msg_type.clone(),
            })?;
        let source = match (r.topic, r.parameter) {
            (Some(topic), None) => {
                if !is_valid_topic(&topic) {
                    return Err(NodegenError::InvalidTopic(topic));
                }
                VarSource::Topic(topic)
            }
            (None, Some(value)) => {
                if value.kind() != msg_type.kind() {
                    return Err(NodegenError::ParameterKindMismatch {
                        name: r.name,
                        msg_type: msg_type.ros_name(),
                    });
                }
                VarSource::Parameter(value)
            }
            _ => return Err(NodegenError::AmbiguousSource(r.name)),
        };
        entries.push(VarEntry {
            name: r.name,
            msg_type,
            source,
        });
    }
    Ok(VarMapping { entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subscription {
    pub field_name: String,
    pub topic: String,
    pub variable: String,
    pub msg_type: MessageType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub variable: String,
    pub default: Value,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Publisher {
    pub field_name: String,
    pub topic: String,
    pub handler: String,
    pub requirement_id: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoggerSubscription {
    pub field_name: String,
    pub topic: String,
    pub handler: String,
}

/// Wiring of the monitoring and logging nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodePlan {
    pub subscriptions: Vec<Subscription>,
    pub parameters: Vec<Parameter>,
    pub publishers: Vec<Publisher>,
    pub logger_subscriptions: Vec<LoggerSubscription>,
}

impl NodePlan {
    /// Topic an input variable is read from, if it is subscribed.
    pub fn topic_of(&self, variable: &str) -> Option<&str> {
        self.subscriptions
            .iter()
            .find(|s| s.variable == variable)
            .map(|s| s.topic.as_str())
    }
}

pub fn subscription_field(variable: &str) -> String {
    format!("{variable}_subscription_")
}

pub fn publisher_field(handler: &str) -> String {
    format!("{handler}_publisher_")
}

pub fn violation_topic(prefix: &str, handler: &str) -> String {
    format!("{prefix}/{handler}")
}

/// Lays out subscriptions, parameters and publishers for a monitor.
/// Externs keep monitor order; publishers keep trigger order.
pub fn plan_nodes(
    m: &MonitorSpec,
    vm: &VarMapping,
    prefix: &str,
) -> Result<NodePlan, NodegenError> {
    if !is_valid_topic(prefix) {
        return Err(NodegenError::InvalidTopic(prefix.to_string()));
    }
    let mut subscriptions = Vec::new();
    let mut parameters = Vec::new();
    for ext in &m.externs {
        let entry = vm
            .get(&ext.name)
            .ok_or_else(|| NodegenError::UnmappedVariable(ext.name.clone()))?;
        if entry.msg_type.kind() != ext.kind {
            return Err(NodegenError::MessageKindMismatch {
                name: ext.name.clone(),
                kind: ext.kind,
                msg_type: entry.msg_type.ros_name(),
            });
        }
        match &entry.source {
            VarSource::Topic(topic) => subscriptions.push(Subscription {
                field_name: subscription_field(&ext.name),
                topic: topic.clone(),
                variable: ext.name.clone(),
                msg_type: entry.msg_type,
            }),
            VarSource::Parameter(default) => parameters.push(Parameter {
                variable: ext.name.clone(),
                default: *default,
            }),
        }
    }
    let publishers: Vec<Publisher> = m
        .triggers
        .iter()
        .map(|t| Publisher {
            field_name: publisher_field(&t.handler_name),
            topic: violation_topic(prefix, &t.handler_name),
            handler: t.handler_name.clone(),
            requirement_id: t.requirement_id.clone(),
        })
        .collect();
    let logger_subscriptions = publishers
        .iter()
        .map(|p| LoggerSubscription {
            field_name: subscription_field(&p.handler),
            topic: p.topic.clone(),
            handler: p.handler.clone(),
        })
        .collect();
    Ok(NodePlan {
        subscriptions,
        parameters,
        publishers,
        logger_subscriptions,
    })
}

/// A ROS package name: lowercase ASCII letters, digits and `_`, starting
/// with a letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackageName(String);

impl PackageName {
    pub fn new(name: &str) -> Result<Self, NodegenError> {
        let ok = name.starts_with(|c: char| c.is_ascii_lowercase())
            && name
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
        if ok {
            Ok(Self(name.to_string()))
        } else {
            Err(NodegenError::InvalidPackageName(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}
