from yamabe.cli import main

main()
