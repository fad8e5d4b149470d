#![allow(dead_code)]

pub mod contract;
pub mod exchanges;
pub mod networks;
