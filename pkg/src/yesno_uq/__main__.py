from yesno_uq.cli import main

main()
