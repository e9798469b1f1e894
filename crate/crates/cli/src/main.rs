fn main() {
    eprintln!("scaffold");
}
