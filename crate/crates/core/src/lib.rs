// Copyright 2026 The slitport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Dense state-vector simulation of two-slit atomic teleportation through
//! dispersive cavities.
//!
//! [`fockspace`] holds named-register composite states, [`gates`] builds the
//! operators, [`protocol`] runs a step list against a layout, [`oracle`]
//! supplies closed-form reference kets and [`script`] reads and writes the
//! `.qprot` protocol language. [`cli`] is the command-line front end.

pub mod cli;
pub mod fockspace;
pub mod gates;
pub mod oracle;
pub mod protocol;
pub mod script;
