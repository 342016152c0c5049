//! Tree automorphisms in portrait form: parse, compose, act on vertices.

use arboreal::tree::{NodeAddress, TreeAutomorphism, TreeShape};

fn main() -> arboreal::Result<()> {
    // The order-four element of Aut(T_2): swap at the root and at node 1.
    let a: TreeAutomorphism = "ε:10\n0:01\n1:10\n".parse()?;
    let shape = a.shape();
    println!("{shape}");
    print!("{a}");

    for x in shape.level_addresses(2) {
        println!("  {} -> {}", x.display(2), a.apply(&x)?.display(2));
    }

    let mut order = 1;
    while !a.pow(order).is_identity() {
        order += 1;
    }
    println!("order {order}");

    let b = TreeAutomorphism::root_rotation(shape)?;
    let ab = a.compose(&b)?;
    println!("a∘b:\n{ab}");
    println!("a restricted to level 1:\n{}", a.restrict(1)?);
    let a2 = a.pow(2);
    let node = NodeAddress::new(&shape, vec![1])?;
    println!("a² fixes {}; its section there:\n{}", node.display(2), a2.subtree_section(&node)?);

    let wide = TreeShape::new(12, 1)?;
    println!("d > 10 uses commas:\n{}", TreeAutomorphism::root_rotation(wide)?);
    Ok(())
}
